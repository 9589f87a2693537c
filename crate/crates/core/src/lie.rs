//! Fixed-basis Lie algebras and groups used by the examples: so(2), o(2),
//! the dihedral groups, so(3), se(2), so(4) and tori.
//!
//! Coordinates:
//! - se(2): `(theta_dot, v1, v2)`, dual `(x, alpha1, alpha2)`;
//! - so(4): `(x, a)` in R^3 x R^3, dual `(chi, rho)`;
//! - so(3): R^3 with the cross product;
//! - so(2), o(2) and t^n: R^n with zero bracket.
//!
//! The coadjoint convention is `<ad*_xi mu, eta> = <mu, [xi, eta]>`, which
//! reproduces the component formulas used for se(2)* and so(4)*.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, INCLUSION_TOL, NULLSPACE_RTOL};

/// Tolerance for `ad*_xi mu = 0` when a commuting pair is required.
pub const COMMUTE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupId {
    Trivial,
    SO2,
    O2,
    Dn(u32),
    SO3,
    SE2,
    SO4,
    Torus(u32),
}

impl GroupId {
    pub fn validate(self) -> Result<Self> {
        match self {
            GroupId::Dn(0) => Err(Error::InvalidParameter("D_n requires n >= 1".into())),
            GroupId::Torus(0) => Err(Error::InvalidParameter("T^n requires n >= 1".into())),
            g => Ok(g),
        }
    }

    /// Dimension of the Lie algebra (of the identity component).
    pub fn algebra_dim(self) -> usize {
        match self {
            GroupId::Trivial | GroupId::Dn(_) => 0,
            GroupId::SO2 | GroupId::O2 => 1,
            GroupId::SO3 | GroupId::SE2 => 3,
            GroupId::SO4 => 6,
            GroupId::Torus(n) => n as usize,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, GroupId::Trivial | GroupId::Dn(_))
    }

    pub fn is_compact(self) -> bool {
        !matches!(self, GroupId::SE2)
    }

    /// Whether `self` is (up to the embeddings used here) a closed subgroup
    /// of `ambient`.
    pub fn embeds_in(self, ambient: GroupId) -> bool {
        use GroupId::*;
        if self == ambient || self == Trivial {
            return true;
        }
        match (self, ambient) {
            (Dn(_), O2) | (SO2, O2) | (SO2, SO3) | (SO3, SO4) | (SO2, SO4) | (SO2, SE2) => true,
            (Dn(k), Dn(n)) => n % k == 0,
            (Torus(r), Torus(n)) => r <= n,
            (SO2, Torus(_)) => true,
            _ => false,
        }
    }

    /// All elements of a finite group, rotations first.
    pub fn finite_elements(self) -> Option<Vec<GroupElement>> {
        match self {
            GroupId::Trivial => Some(vec![GroupElement::identity(self)]),
            GroupId::Dn(n) => {
                let mut out: Vec<GroupElement> =
                    (0..n).map(|k| GroupElement::dihedral_rotation(n, k)).collect();
                out.extend((0..n).map(|k| GroupElement::dihedral_reflection(n, k)));
                Some(out)
            }
            _ => None,
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Trivial => write!(f, "trivial"),
            GroupId::SO2 => write!(f, "SO2"),
            GroupId::O2 => write!(f, "O2"),
            GroupId::Dn(n) => write!(f, "D{n}"),
            GroupId::SO3 => write!(f, "SO3"),
            GroupId::SE2 => write!(f, "SE2"),
            GroupId::SO4 => write!(f, "SO4"),
            GroupId::Torus(n) => write!(f, "T{n}"),
        }
    }
}

impl FromStr for GroupId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::InvalidParameter(format!("unknown group `{s}`"));
        let g = match t.to_ascii_uppercase().as_str() {
            "TRIVIAL" | "1" => GroupId::Trivial,
            "SO2" => GroupId::SO2,
            "O2" => GroupId::O2,
            "SO3" => GroupId::SO3,
            "SE2" => GroupId::SE2,
            "SO4" => GroupId::SO4,
            u if u.starts_with('D') => GroupId::Dn(u[1..].parse().map_err(|_| bad())?),
            u if u.starts_with('T') => GroupId::Torus(u[1..].parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        g.validate()
    }
}

impl Serialize for GroupId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_len(group: GroupId, coords: &DVector<f64>) -> Result<()> {
    let expected = group.algebra_dim();
    if coords.len() != expected {
        return Err(Error::DimensionMismatch { expected, found: coords.len() });
    }
    Ok(())
}

fn same_group(a: GroupId, b: GroupId) -> Result<()> {
    if a != b {
        return Err(Error::GroupMismatch { expected: a, found: b });
    }
    Ok(())
}

/// Element of a Lie algebra in the fixed basis of its group.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraVector {
    group: GroupId,
    coords: DVector<f64>,
}

impl AlgebraVector {
    pub fn new(group: GroupId, coords: impl Into<DVector<f64>>) -> Result<Self> {
        let coords = coords.into();
        check_len(group.validate()?, &coords)?;
        Ok(Self { group, coords })
    }

    pub fn from_slice(group: GroupId, coords: &[f64]) -> Result<Self> {
        Self::new(group, DVector::from_column_slice(coords))
    }

    pub fn zero(group: GroupId) -> Self {
        Self { group, coords: DVector::zeros(group.algebra_dim()) }
    }

    pub fn basis(group: GroupId) -> Vec<Self> {
        let n = group.algebra_dim();
        (0..n)
            .map(|i| Self { group, coords: DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }) })
            .collect()
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { group: self.group, coords: &self.coords * s }
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }
}

/// Element of the dual of a Lie algebra, in the dual of the fixed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalgebraVector {
    group: GroupId,
    coords: DVector<f64>,
}

impl CoalgebraVector {
    pub fn new(group: GroupId, coords: impl Into<DVector<f64>>) -> Result<Self> {
        let coords = coords.into();
        check_len(group.validate()?, &coords)?;
        Ok(Self { group, coords })
    }

    pub fn from_slice(group: GroupId, coords: &[f64]) -> Result<Self> {
        Self::new(group, DVector::from_column_slice(coords))
    }

    pub fn zero(group: GroupId) -> Self {
        Self { group, coords: DVector::zeros(group.algebra_dim()) }
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementKind {
    Identity,
    /// Rotation by an angle (planar groups, or about e3 for SO(2) inside SO(3)).
    Rotation(f64),
    /// Reflection about the line at the given angle from the x-axis.
    Reflection(f64),
    /// Orthogonal 3x3 matrix with determinant one.
    Matrix(Matrix3<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    group: GroupId,
    kind: ElementKind,
}

impl GroupElement {
    pub fn identity(group: GroupId) -> Self {
        Self { group, kind: ElementKind::Identity }
    }

    /// Rotation in SO(2) or O(2).
    pub fn rotation(group: GroupId, angle: f64) -> Result<Self> {
        match group {
            GroupId::SO2 | GroupId::O2 => Ok(Self { group, kind: ElementKind::Rotation(angle) }),
            g => Err(Error::UnsupportedGroup { op: "rotation", group: g }),
        }
    }

    /// Reflection `r_alpha` in O(2).
    pub fn reflection(axis: f64) -> Self {
        Self { group: GroupId::O2, kind: ElementKind::Reflection(axis) }
    }

    /// `R_{2 pi k / n}` in D_n.
    pub fn dihedral_rotation(n: u32, k: u32) -> Self {
        let angle = 2.0 * PI * f64::from(k % n) / f64::from(n);
        Self { group: GroupId::Dn(n), kind: ElementKind::Rotation(angle) }
    }

    /// `r_{pi k / n}` in D_n.
    pub fn dihedral_reflection(n: u32, k: u32) -> Self {
        let axis = PI * f64::from(k % n) / f64::from(n);
        Self { group: GroupId::Dn(n), kind: ElementKind::Reflection(axis) }
    }

    pub fn so3(m: Matrix3<f64>) -> Result<Self> {
        let orth = (m.transpose() * m - Matrix3::identity()).amax();
        let det = m.determinant();
        if orth > 1e-12 || (det - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "not a rotation matrix (|R^T R - I| = {orth:e}, det = {det})"
            )));
        }
        Ok(Self { group: GroupId::SO3, kind: ElementKind::Matrix(m) })
    }

    pub fn so3_axis_angle(axis: Vector3<f64>, angle: f64) -> Result<Self> {
        if axis.norm() == 0.0 {
            return Err(Error::InvalidParameter("zero rotation axis".into()));
        }
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        Self::so3(*r.matrix())
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    /// The 3x3 matrix of this element acting on R^3, where planar rotations
    /// act about e3.
    pub fn matrix3(&self) -> Matrix3<f64> {
        match self.kind {
            ElementKind::Identity => Matrix3::identity(),
            ElementKind::Rotation(a) => {
                let (s, c) = a.sin_cos();
                Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
            }
            ElementKind::Reflection(a) => {
                let (s, c) = (2.0 * a).sin_cos();
                Matrix3::new(c, s, 0.0, s, -c, 0.0, 0.0, 0.0, 1.0)
            }
            ElementKind::Matrix(m) => m,
        }
    }
}

/// `<mu, xi>` in the fixed dual bases.
pub fn pairing(mu: &CoalgebraVector, xi: &AlgebraVector) -> Result<f64> {
    same_group(mu.group, xi.group)?;
    Ok(mu.coords.dot(&xi.coords))
}

fn v3(c: &DVector<f64>, offset: usize) -> Vector3<f64> {
    Vector3::new(c[offset], c[offset + 1], c[offset + 2])
}

fn join(a: Vector3<f64>, b: Vector3<f64>) -> DVector<f64> {
    DVector::from_column_slice(&[a.x, a.y, a.z, b.x, b.y, b.z])
}

fn unsupported(op: &'static str, group: GroupId) -> Error {
    Error::UnsupportedGroup { op, group }
}

/// Lie bracket `[x, y]`.
pub fn bracket(x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector> {
    same_group(x.group, y.group)?;
    let g = x.group;
    let (a, b) = (&x.coords, &y.coords);
    let coords = match g {
        GroupId::SO3 => {
            let c = v3(a, 0).cross(&v3(b, 0));
            DVector::from_column_slice(c.as_slice())
        }
        GroupId::SO4 => {
            let (x1, a1, x2, a2) = (v3(a, 0), v3(a, 3), v3(b, 0), v3(b, 3));
            join(x1.cross(&x2) + a1.cross(&a2), x1.cross(&a2) + a1.cross(&x2))
        }
        GroupId::SE2 => {
            // [(w1, v), (w2, u)] = (0, w1 J u - w2 J v), J(p, q) = (-q, p)
            let (w1, w2) = (a[0], b[0]);
            DVector::from_column_slice(&[
                0.0,
                -w1 * b[2] + w2 * a[2],
                w1 * b[1] - w2 * a[1],
            ])
        }
        GroupId::SO2 | GroupId::O2 | GroupId::Torus(_) => DVector::zeros(g.algebra_dim()),
        GroupId::Dn(_) | GroupId::Trivial => return Err(unsupported("bracket", g)),
    };
    Ok(AlgebraVector { group: g, coords })
}

/// Infinitesimal coadjoint action `ad*_xi mu`.
pub fn ad_star(xi: &AlgebraVector, mu: &CoalgebraVector) -> Result<CoalgebraVector> {
    same_group(xi.group, mu.group)?;
    let g = xi.group;
    let (x, m) = (&xi.coords, &mu.coords);
    let coords = match g {
        GroupId::SE2 => {
            let (td, v1, v2) = (x[0], x[1], x[2]);
            let (a1, a2) = (m[1], m[2]);
            DVector::from_column_slice(&[a1 * v2 - a2 * v1, td * a2, -td * a1])
        }
        GroupId::SO3 => {
            let c = v3(m, 0).cross(&v3(x, 0));
            DVector::from_column_slice(c.as_slice())
        }
        GroupId::SO4 => {
            let (xx, aa, chi, rho) = (v3(x, 0), v3(x, 3), v3(m, 0), v3(m, 3));
            join(chi.cross(&xx) + rho.cross(&aa), chi.cross(&aa) + rho.cross(&xx))
        }
        GroupId::SO2 | GroupId::O2 | GroupId::Torus(_) => DVector::zeros(g.algebra_dim()),
        GroupId::Dn(_) | GroupId::Trivial => return Err(unsupported("ad_star", g)),
    };
    Ok(CoalgebraVector { group: g, coords })
}

/// Matrix of the linear map `x -> ad*_x mu` (columns indexed by the basis).
pub fn ad_star_matrix(mu: &CoalgebraVector) -> Result<DMatrix<f64>> {
    let n = mu.group.algebra_dim();
    let mut m = DMatrix::zeros(n, n);
    for (j, e) in AlgebraVector::basis(mu.group).iter().enumerate() {
        m.set_column(j, &ad_star(e, mu)?.coords);
    }
    if n == 0 {
        ad_star(&AlgebraVector::zero(mu.group), mu)?;
    }
    Ok(m)
}

/// Matrix of `x -> [x, xi]`.
pub fn centralizer_matrix(xi: &AlgebraVector) -> Result<DMatrix<f64>> {
    let n = xi.group.algebra_dim();
    let mut m = DMatrix::zeros(n, n);
    for (j, e) in AlgebraVector::basis(xi.group).iter().enumerate() {
        m.set_column(j, &bracket(e, xi)?.coords);
    }
    if n == 0 {
        bracket(xi, xi)?;
    }
    Ok(m)
}

/// Linear subspace of a Lie algebra, stored as orthonormal basis columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    group: GroupId,
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn new(group: GroupId, basis: DMatrix<f64>) -> Self {
        Self { group, basis }
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<AlgebraVector> {
        self.basis
            .column_iter()
            .map(|c| AlgebraVector { group: self.group, coords: c.into_owned() })
            .collect()
    }

    /// Whether every basis vector of `other` lies in `self`.
    pub fn contains(&self, other: &Subspace) -> bool {
        linalg::inclusion_residual(&self.basis, &other.basis).0 <= INCLUSION_TOL
    }
}

/// `g_mu`: the nullspace of `x -> ad*_x mu`.
pub fn stabilizer_algebra(mu: &CoalgebraVector) -> Result<Subspace> {
    let m = ad_star_matrix(mu)?;
    Ok(Subspace::new(mu.group, linalg::nullspace(&m, NULLSPACE_RTOL)))
}

/// `g_xi`: the nullspace of `x -> [x, xi]`.
pub fn centralizer(xi: &AlgebraVector) -> Result<Subspace> {
    let m = centralizer_matrix(xi)?;
    Ok(Subspace::new(xi.group, linalg::nullspace(&m, NULLSPACE_RTOL)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityVerdict {
    pub holds: bool,
    /// A vector of `g_mu` outside `g_xi` when the inclusion fails.
    pub witness: Option<AlgebraVector>,
    pub stabilizer_dim: usize,
    pub centralizer_dim: usize,
}

/// Condition (R): `g_mu` is contained in `g_xi`. Requires `ad*_xi mu = 0`.
pub fn check_r(mu: &CoalgebraVector, xi: &AlgebraVector) -> Result<RegularityVerdict> {
    let comm = ad_star(xi, mu)?.norm();
    if comm > COMMUTE_TOL * (1.0 + xi.norm() * mu.norm()) {
        return Err(Error::NonCommuting { residual: comm });
    }
    let g_mu = stabilizer_algebra(mu)?;
    let g_xi = centralizer(xi)?;
    let (res, worst) = linalg::inclusion_residual(&g_xi.basis, &g_mu.basis);
    let holds = res <= INCLUSION_TOL;
    let witness = if holds {
        None
    } else {
        worst.map(|j| AlgebraVector { group: mu.group, coords: g_mu.basis.column(j).into_owned() })
    };
    Ok(RegularityVerdict {
        holds,
        witness,
        stabilizer_dim: g_mu.dim(),
        centralizer_dim: g_xi.dim(),
    })
}

/// Inclusion `i_h : h -> g` given by the images of the basis of `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubalgebraEmbedding {
    ambient: GroupId,
    sub: GroupId,
    images: DMatrix<f64>,
}

impl SubalgebraEmbedding {
    pub fn new(ambient: GroupId, sub: GroupId, images: DMatrix<f64>) -> Result<Self> {
        let (r, c) = images.shape();
        if r != ambient.algebra_dim() {
            return Err(Error::DimensionMismatch { expected: ambient.algebra_dim(), found: r });
        }
        if c != sub.algebra_dim() {
            return Err(Error::DimensionMismatch { expected: sub.algebra_dim(), found: c });
        }
        Ok(Self { ambient, sub, images })
    }

    /// `so(3)_r = {(x, 0)}` inside so(4).
    pub fn so3_rotations_in_so4() -> Self {
        let mut m = DMatrix::zeros(6, 3);
        for i in 0..3 {
            m[(i, i)] = 1.0;
        }
        Self { ambient: GroupId::SO4, sub: GroupId::SO3, images: m }
    }

    /// `so(3)_d = {(x/2, x/2)}` inside so(4).
    pub fn so3_diagonal_in_so4() -> Self {
        let mut m = DMatrix::zeros(6, 3);
        for i in 0..3 {
            m[(i, i)] = 0.5;
            m[(i + 3, i)] = 0.5;
        }
        Self { ambient: GroupId::SO4, sub: GroupId::SO3, images: m }
    }

    /// Rotations about `axis` inside so(3).
    pub fn so2_in_so3(axis: Vector3<f64>) -> Self {
        let a = axis.normalize();
        Self {
            ambient: GroupId::SO3,
            sub: GroupId::SO2,
            images: DMatrix::from_column_slice(3, 1, a.as_slice()),
        }
    }

    /// The first `r` circle factors of T^n.
    pub fn subtorus(n: u32, r: u32) -> Result<Self> {
        if r > n {
            return Err(Error::InvalidParameter(format!("T{r} does not embed in T{n}")));
        }
        let (n, r) = (n as usize, r as usize);
        let images = DMatrix::from_fn(n, r, |i, j| if i == j { 1.0 } else { 0.0 });
        let sub = if r == 0 { GroupId::Trivial } else { GroupId::Torus(r as u32) };
        Ok(Self { ambient: GroupId::Torus(n as u32), sub, images })
    }

    /// A finite subgroup of a group: zero-dimensional subalgebra.
    pub fn discrete(ambient: GroupId, sub: GroupId) -> Self {
        Self { ambient, sub, images: DMatrix::zeros(ambient.algebra_dim(), 0) }
    }

    pub fn identity(g: GroupId) -> Self {
        let n = g.algebra_dim();
        Self { ambient: g, sub: g, images: DMatrix::identity(n, n) }
    }

    pub fn ambient(&self) -> GroupId {
        self.ambient
    }

    pub fn sub(&self) -> GroupId {
        self.sub
    }

    pub fn images(&self) -> &DMatrix<f64> {
        &self.images
    }

    pub fn include(&self, x: &AlgebraVector) -> Result<AlgebraVector> {
        same_group(self.sub, x.group)?;
        Ok(AlgebraVector { group: self.ambient, coords: &self.images * &x.coords })
    }

    /// Restriction `i_h^*(mu) = mu|_h`.
    pub fn restrict(&self, mu: &CoalgebraVector) -> Result<CoalgebraVector> {
        if mu.group != self.ambient {
            if mu.coords.len() != self.ambient.algebra_dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.ambient.algebra_dim(),
                    found: mu.coords.len(),
                });
            }
            return Err(Error::GroupMismatch { expected: self.ambient, found: mu.group });
        }
        Ok(CoalgebraVector { group: self.sub, coords: self.images.transpose() * &mu.coords })
    }

    /// `h_mu = h ∩ g_mu`, returned as ambient vectors.
    pub fn stabilized_by(&self, mu: &CoalgebraVector) -> Result<Subspace> {
        same_group(self.ambient, mu.group)?;
        if self.images.ncols() == 0 {
            return Ok(Subspace::new(self.ambient, DMatrix::zeros(self.ambient.algebra_dim(), 0)));
        }
        let ad = ad_star_matrix(mu)?;
        let coeffs = linalg::nullspace(&(ad * &self.images), NULLSPACE_RTOL);
        let amb = &self.images * coeffs;
        Ok(Subspace::new(self.ambient, linalg::column_space(&amb, NULLSPACE_RTOL)))
    }
}
