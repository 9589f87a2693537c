use nalgebra::DVector;
use proptest::prelude::*;
use symbreak::lie::{
    ad_star, bracket, check_r, pairing, stabilizer_algebra, AlgebraVector, CoalgebraVector, SubalgebraEmbedding,
};
use symbreak::GroupId;

const GROUPS: [GroupId; 4] = [GroupId::SO3, GroupId::SO4, GroupId::SE2, GroupId::Torus(3)];

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, n)
}

fn triple() -> impl Strategy<Value = (GroupId, Vec<f64>, Vec<f64>, Vec<f64>)> {
    prop::sample::select(GROUPS.to_vec()).prop_flat_map(|g| {
        let n = g.algebra_dim();
        (Just(g), coords(n), coords(n), coords(n))
    })
}

fn alg(g: GroupId, c: &[f64]) -> AlgebraVector {
    AlgebraVector::from_slice(g, c).unwrap()
}

fn dual(g: GroupId, c: &[f64]) -> CoalgebraVector {
    CoalgebraVector::from_slice(g, c).unwrap()
}

fn add(a: &AlgebraVector, b: &AlgebraVector) -> AlgebraVector {
    AlgebraVector::new(a.group(), a.coords() + b.coords()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn pairing_is_bilinear((g, m, x, y) in triple(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let mu = dual(g, &m);
        let (xi, eta) = (alg(g, &x), alg(g, &y));
        let lhs = pairing(&mu, &add(&xi.scale(a), &eta.scale(b))).unwrap();
        let rhs = a * pairing(&mu, &xi).unwrap() + b * pairing(&mu, &eta).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn bracket_antisymmetric_and_jacobi((g, a, b, c) in triple()) {
        let (x, y, z) = (alg(g, &a), alg(g, &b), alg(g, &c));
        let xy = bracket(&x, &y).unwrap();
        let yx = bracket(&y, &x).unwrap();
        prop_assert!((xy.coords() + yx.coords()).amax() <= 1e-12);
        let j = bracket(&x, &bracket(&y, &z).unwrap()).unwrap().coords()
            + bracket(&y, &bracket(&z, &x).unwrap()).unwrap().coords()
            + bracket(&z, &bracket(&x, &y).unwrap()).unwrap().coords();
        prop_assert!(j.amax() <= 1e-12);
    }

    #[test]
    fn coadjoint_is_dual_of_adjoint((g, m, x, y) in triple()) {
        let (mu, xi, eta) = (dual(g, &m), alg(g, &x), alg(g, &y));
        let lhs = pairing(&ad_star(&xi, &mu).unwrap(), &eta).unwrap();
        let rhs = pairing(&mu, &bracket(&xi, &eta).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn stabilizer_columns_fix_mu((g, m, _x, _y) in triple()) {
        let mu = dual(g, &m);
        let stab = stabilizer_algebra(&mu).unwrap();
        for b in stab.vectors() {
            prop_assert!(ad_star(&b, &mu).unwrap().norm() <= 1e-10);
        }
    }

    #[test]
    fn restriction_is_dual_of_inclusion(m in coords(6), diag in any::<bool>()) {
        let emb = if diag { SubalgebraEmbedding::so3_diagonal_in_so4() } else { SubalgebraEmbedding::so3_rotations_in_so4() };
        let mu = dual(GroupId::SO4, &m);
        let r = emb.restrict(&mu).unwrap();
        for e in AlgebraVector::basis(GroupId::SO3) {
            let lhs = pairing(&r, &e).unwrap();
            let rhs = pairing(&mu, &emb.include(&e).unwrap()).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-14);
        }
    }

    #[test]
    fn diagonal_subalgebra_always_regular(m in coords(6), t in -2.0..2.0f64) {
        let emb = SubalgebraEmbedding::so3_diagonal_in_so4();
        let mu = dual(GroupId::SO4, &m);
        let a = emb.restrict(&mu).unwrap();
        let xi = AlgebraVector::new(
            GroupId::SO4,
            DVector::from_iterator(6, a.coords().iter().chain(a.coords().iter()).map(|v| v * t)),
        )
        .unwrap();
        prop_assert!(check_r(&mu, &xi).unwrap().holds);
    }
}

#[test]
fn pairing_examples() {
    assert_eq!(pairing(&dual(GroupId::SE2, &[1.0, 2.0, 3.0]), &alg(GroupId::SE2, &[4.0, 5.0, 6.0])).unwrap(), 32.0);
    assert_eq!(pairing(&dual(GroupId::SE2, &[1.0, 2.0, 3.0]), &AlgebraVector::zero(GroupId::SE2)).unwrap(), 0.0);
}

#[test]
fn stabilizer_dimensions() {
    assert_eq!(stabilizer_algebra(&CoalgebraVector::zero(GroupId::SO4)).unwrap().dim(), 6);
    assert_eq!(stabilizer_algebra(&dual(GroupId::SO4, &[0.0, 0.0, 1.0, 0.0, 0.0, 2.0])).unwrap().dim(), 2);
    assert_eq!(stabilizer_algebra(&dual(GroupId::SE2, &[0.3, 1.0, -0.5])).unwrap().dim(), 1);
}
