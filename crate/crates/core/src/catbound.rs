//! Equivariant Lyusternik-Schnirelmann category lower bounds.
//!
//! The bounds are read from a small closed-form table. Queries that are not
//! covered are refused with [`Error::NoTableEntry`]; no value is ever
//! guessed. Extra rows can be supplied from a TOML file:
//!
//! ```toml
//! [[row]]
//! g = "O2"
//! h = "D4"
//! isotropy = "reflection"
//! context = "equilibria"
//! bound = 2
//! citation = "S^1 / D_4 is an arc"
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{CoalgebraVector, GroupId};

/// Isotropy subgroup `G_m` of the critical orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Isotropy {
    Trivial,
    /// A reflection subgroup `<r_theta>` of O(2).
    Reflection,
    /// A subtorus of the given rank.
    Subtorus(u32),
}

impl FromStr for Isotropy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "trivial" | "free" => Ok(Isotropy::Trivial),
            "reflection" => Ok(Isotropy::Reflection),
            _ => t
                .strip_prefix("subtorus:")
                .and_then(|r| r.parse().ok())
                .map(Isotropy::Subtorus)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown isotropy `{s}`"))),
        }
    }
}

impl fmt::Display for Isotropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Isotropy::Trivial => write!(f, "trivial"),
            Isotropy::Reflection => write!(f, "reflection"),
            Isotropy::Subtorus(r) => write!(f, "subtorus:{r}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Context {
    Equilibria,
    /// Relative equilibria with momentum stabilizer `G_mu`.
    RelativeEquilibria { g_mu: GroupId },
}

impl FromStr for Context {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("equilibria") {
            return Ok(Context::Equilibria);
        }
        t.strip_prefix("relative_equilibria:")
            .and_then(|g| g.parse().ok())
            .map(|g_mu| Context::RelativeEquilibria { g_mu })
            .ok_or_else(|| Error::InvalidParameter(format!("unknown context `{s}`")))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Context::Equilibria => write!(f, "equilibria"),
            Context::RelativeEquilibria { g_mu } => write!(f, "relative_equilibria:{g_mu}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundQuery {
    pub g: GroupId,
    pub h: GroupId,
    pub isotropy: Isotropy,
    pub context: Context,
}

impl fmt::Display for BoundQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G={}, H={}, G_m={}, {}", self.g, self.h, self.isotropy, self.context)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub value: u32,
    pub citation: String,
    /// The OPS condition is assumed (automatic for compact groups), not
    /// verified.
    pub ops_assumed: bool,
}

pub const DIHEDRAL_CIRCLE: &str =
    "Cat_{D_n}(O(2)/<r>) = Cat_{D_n}(S^1) = 2: S^1/D_n is a closed arc, which needs two invariant contractible-to-orbit sets";
pub const CIRCLE_FREE: &str =
    "Cat_{SO(2)}(S^1) = 1: SO(2) acts freely and transitively on the circle, a single orbit";
pub const TORUS_FREE: &str =
    "Cat_{T^r}(T^n) = Cat(T^(n-r)) = (n-r)+1 for a free action: LS category of a torus is its dimension plus one";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideRow {
    g: String,
    h: String,
    isotropy: String,
    context: String,
    bound: u32,
    citation: String,
    #[serde(default)]
    ops_assumed: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideFile {
    #[serde(default)]
    row: Vec<OverrideRow>,
}

/// Built-in bounds plus any override rows (consulted first).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundTable {
    overrides: Vec<(BoundQuery, Bound)>,
}

impl BoundTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_overrides_str(text: &str) -> Result<Self> {
        let file: OverrideFile = toml::from_str(text).map_err(|e| Error::Override(e.to_string()))?;
        let mut table = Self::new();
        for (i, row) in file.row.into_iter().enumerate() {
            let bad = |what: String| Error::Override(format!("row {}: {what}", i + 1));
            if row.citation.trim().is_empty() {
                return Err(bad("citation must not be empty".into()));
            }
            if row.bound == 0 {
                return Err(bad("bound must be at least 1".into()));
            }
            let g: GroupId = row.g.parse().map_err(|e: Error| bad(e.to_string()))?;
            let h: GroupId = row.h.parse().map_err(|e: Error| bad(e.to_string()))?;
            let isotropy = row.isotropy.parse().map_err(|e: Error| bad(e.to_string()))?;
            let context = row.context.parse().map_err(|e: Error| bad(e.to_string()))?;
            if !h.embeds_in(g) {
                return Err(bad(format!("{h} is not a subgroup of {g}")));
            }
            let q = BoundQuery { g, h, isotropy, context };
            let b = Bound {
                value: row.bound,
                citation: row.citation,
                ops_assumed: row.ops_assumed.unwrap_or(g.is_compact()),
            };
            table.overrides.push((q, b));
        }
        Ok(table)
    }

    pub fn with_overrides_file(path: &Path) -> Result<Self> {
        Self::with_overrides_str(&std::fs::read_to_string(path)?)
    }

    pub fn lookup(&self, q: &BoundQuery) -> Result<Bound> {
        if let Some((_, b)) = self.overrides.iter().find(|(k, _)| k == q) {
            return Ok(b.clone());
        }
        builtin(q)
    }
}

/// Bound from the built-in table.
pub fn bound(q: &BoundQuery) -> Result<Bound> {
    builtin(q)
}

fn builtin(q: &BoundQuery) -> Result<Bound> {
    use GroupId::*;
    if !q.h.embeds_in(q.g) {
        return Err(Error::InvalidParameter(format!("{} is not a subgroup of {}", q.h, q.g)));
    }
    let row = |value: u32, citation: &str| Bound { value, citation: citation.into(), ops_assumed: q.g.is_compact() };
    match (q.g, q.h, q.isotropy, q.context) {
        (O2, Dn(_), Isotropy::Reflection, Context::Equilibria) => Ok(row(2, DIHEDRAL_CIRCLE)),
        (_, SO2, Isotropy::Trivial, Context::RelativeEquilibria { g_mu: SO2 }) => Ok(row(1, CIRCLE_FREE)),
        (Torus(n), h, Isotropy::Trivial, Context::Equilibria) => {
            let r = match h {
                Trivial => 0,
                Torus(r) => r,
                _ => return Err(Error::NoTableEntry(q.to_string())),
            };
            Ok(row(n - r + 1, TORUS_FREE))
        }
        _ => Err(Error::NoTableEntry(q.to_string())),
    }
}

/// Hypothesis `G_mu ⊂ H_alpha` for the shipped group pairs. `None` means the
/// pair is not covered.
pub fn stabilizer_in_subgroup(g: GroupId, h: GroupId, mu: &CoalgebraVector) -> Option<bool> {
    match (g, h) {
        (GroupId::SO3, GroupId::SO2) if mu.group() == GroupId::SO3 => {
            // H = rotations about e3. G_mu is SO(2) about mu for mu != 0 and
            // all of SO(3) for mu = 0.
            let m = Vector3::new(mu.coords()[0], mu.coords()[1], mu.coords()[2]);
            let n = m.norm();
            Some(n > 0.0 && m.x.hypot(m.y) <= 1e-12 * n)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_context_and_isotropy() {
        assert_eq!("relative_equilibria:SO2".parse::<Context>().unwrap(), Context::RelativeEquilibria {
            g_mu: GroupId::SO2
        });
        assert_eq!("subtorus:2".parse::<Isotropy>().unwrap(), Isotropy::Subtorus(2));
        assert!("bogus".parse::<Isotropy>().is_err());
    }

    #[test]
    fn non_subgroup_rejected() {
        let q = BoundQuery { g: GroupId::SO2, h: GroupId::SO3, isotropy: Isotropy::Trivial, context: Context::Equilibria };
        assert!(bound(&q).is_err());
    }

    #[test]
    fn pendulum_hypothesis() {
        let up = CoalgebraVector::from_slice(GroupId::SO3, &[0.0, 0.0, 2.0]).unwrap();
        let tilted = CoalgebraVector::from_slice(GroupId::SO3, &[1.0, 0.0, 2.0]).unwrap();
        assert_eq!(stabilizer_in_subgroup(GroupId::SO3, GroupId::SO2, &up), Some(true));
        assert_eq!(stabilizer_in_subgroup(GroupId::SO3, GroupId::SO2, &tilted), Some(false));
        assert_eq!(stabilizer_in_subgroup(GroupId::SO4, GroupId::SO3, &CoalgebraVector::zero(GroupId::SO4)), None);
    }
}
