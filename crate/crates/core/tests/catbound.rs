use nalgebra::DVector;
use symbreak::catbound::{
    bound, stabilizer_in_subgroup, Bound, BoundQuery, BoundTable, Context, Isotropy, CIRCLE_FREE, DIHEDRAL_CIRCLE,
    TORUS_FREE,
};
use symbreak::lie::CoalgebraVector;
use symbreak::{Error, GroupId};

fn q(g: GroupId, h: GroupId, isotropy: Isotropy, context: Context) -> BoundQuery {
    BoundQuery { g, h, isotropy, context }
}

#[test]
fn documented_rows() {
    let rows = [
        (q(GroupId::O2, GroupId::Dn(3), Isotropy::Reflection, Context::Equilibria), 2, DIHEDRAL_CIRCLE),
        (
            q(GroupId::SO2, GroupId::SO2, Isotropy::Trivial, Context::RelativeEquilibria { g_mu: GroupId::SO2 }),
            1,
            CIRCLE_FREE,
        ),
        (q(GroupId::Torus(3), GroupId::Torus(1), Isotropy::Trivial, Context::Equilibria), 3, TORUS_FREE),
        (q(GroupId::O2, GroupId::Dn(2), Isotropy::Reflection, Context::Equilibria), 2, DIHEDRAL_CIRCLE),
    ];
    for (query, value, citation) in rows {
        let b = bound(&query).unwrap();
        assert_eq!(b, Bound { value, citation: citation.to_string(), ops_assumed: true }, "{query}");
        assert!(!b.citation.trim().is_empty());
    }
}

#[test]
fn torus_rows_step_by_one() {
    for n in 1..=6 {
        let at = |r: u32| {
            let h = if r == 0 { GroupId::Trivial } else { GroupId::Torus(r) };
            bound(&q(GroupId::Torus(n), h, Isotropy::Trivial, Context::Equilibria)).unwrap().value
        };
        for r in 0..n {
            assert_eq!(at(r) - at(r + 1), 1);
            assert!(at(r) >= 1);
        }
        assert_eq!(at(n), 1);
    }
}

#[test]
fn unsupported_triples_refused() {
    let cases = [
        q(GroupId::Torus(3), GroupId::Torus(1), Isotropy::Subtorus(1), Context::Equilibria),
        q(GroupId::O2, GroupId::Dn(3), Isotropy::Trivial, Context::Equilibria),
        q(GroupId::SO4, GroupId::SO3, Isotropy::Trivial, Context::Equilibria),
        q(GroupId::SO3, GroupId::SO2, Isotropy::Trivial, Context::RelativeEquilibria { g_mu: GroupId::SO3 }),
    ];
    for c in cases {
        assert!(matches!(bound(&c), Err(Error::NoTableEntry(_))), "{c}");
    }
    let bad = q(GroupId::SO2, GroupId::SO3, Isotropy::Trivial, Context::Equilibria);
    assert!(matches!(bound(&bad), Err(Error::InvalidParameter(_))));
}

#[test]
fn parses_query_fields() {
    assert_eq!("reflection".parse::<Isotropy>().unwrap(), Isotropy::Reflection);
    assert_eq!("subtorus:2".parse::<Isotropy>().unwrap(), Isotropy::Subtorus(2));
    assert_eq!(
        "relative_equilibria:SO2".parse::<Context>().unwrap(),
        Context::RelativeEquilibria { g_mu: GroupId::SO2 }
    );
    for i in [Isotropy::Trivial, Isotropy::Reflection, Isotropy::Subtorus(4)] {
        assert_eq!(i.to_string().parse::<Isotropy>().unwrap(), i);
    }
    assert!("cone".parse::<Isotropy>().is_err());
}

#[test]
fn override_rows() {
    let text = r#"
[[row]]
g = "T4"
h = "T1"
isotropy = "subtorus:1"
context = "equilibria"
bound = 2
citation = "hand-checked for a test"
"#;
    let table = BoundTable::with_overrides_str(text).unwrap();
    let query = q(GroupId::Torus(4), GroupId::Torus(1), Isotropy::Subtorus(1), Context::Equilibria);
    assert_eq!(table.lookup(&query).unwrap().value, 2);
    assert!(bound(&query).is_err());
    // Built-in rows still answer.
    let builtin = q(GroupId::O2, GroupId::Dn(3), Isotropy::Reflection, Context::Equilibria);
    assert_eq!(table.lookup(&builtin).unwrap().value, 2);
}

#[test]
fn override_rows_need_citation() {
    let missing = "[[row]]\ng = \"T2\"\nh = \"T1\"\nisotropy = \"trivial\"\ncontext = \"equilibria\"\nbound = 2\n";
    assert!(matches!(BoundTable::with_overrides_str(missing), Err(Error::Override(_))));
    let empty = format!("{missing}citation = \"  \"\n");
    assert!(matches!(BoundTable::with_overrides_str(&empty), Err(Error::Override(_))));
    let unknown = format!("{missing}citation = \"x\"\ncolour = 1\n");
    assert!(matches!(BoundTable::with_overrides_str(&unknown), Err(Error::Override(_))));
    let zero = missing.replace("bound = 2", "bound = 0") + "citation = \"x\"\n";
    assert!(matches!(BoundTable::with_overrides_str(&zero), Err(Error::Override(_))));
}

#[test]
fn override_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.toml");
    std::fs::write(
        &path,
        "[[row]]\ng = \"O2\"\nh = \"D4\"\nisotropy = \"trivial\"\ncontext = \"equilibria\"\nbound = 1\ncitation = \"c\"\n",
    )
    .unwrap();
    let t = BoundTable::with_overrides_file(&path).unwrap();
    assert_eq!(t.lookup(&q(GroupId::O2, GroupId::Dn(4), Isotropy::Trivial, Context::Equilibria)).unwrap().value, 1);
    assert!(BoundTable::with_overrides_file(&dir.path().join("none.toml")).is_err());
}

#[test]
fn stabilizer_inclusion_for_pendulum_pair() {
    let mu = |v: [f64; 3]| CoalgebraVector::new(GroupId::SO3, DVector::from_column_slice(&v)).unwrap();
    assert_eq!(stabilizer_in_subgroup(GroupId::SO3, GroupId::SO2, &mu([0.0, 0.0, 1.0])), Some(true));
    assert_eq!(stabilizer_in_subgroup(GroupId::SO3, GroupId::SO2, &mu([1.0, 0.0, 1.0])), Some(false));
    assert_eq!(stabilizer_in_subgroup(GroupId::SO3, GroupId::SO2, &mu([0.0; 3])), Some(false));
    let so4 = CoalgebraVector::zero(GroupId::SO4);
    assert_eq!(stabilizer_in_subgroup(GroupId::SO4, GroupId::SO3, &so4), None);
}
