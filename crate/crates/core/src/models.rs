//! Phase spaces, Hamiltonian families, momentum maps and group actions.
//!
//! Three phase spaces are modelled:
//! - the cylinder `S^1 x R` with coordinates `(theta, z)` and `omega = dtheta ^ dz`;
//! - `T*S^2` embedded in `R^6` as `{(x, y) : |x| = 1, <x, y> = 0}`;
//! - `se(2)*` with coordinates `nu = (x, alpha1, alpha2)`.
//!
//! Points of `T*S^2` are kept in ambient coordinates. Gradients on it are
//! projected onto the tangent space of the two constraints, and Hessians are
//! the Lagrangian (Riemannian) Hessians on an orthonormal tangent frame.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix2, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{
    pairing, AlgebraVector, CoalgebraVector, ElementKind, GroupElement, GroupId, SubalgebraEmbedding,
};
use crate::linalg::{self, NULLSPACE_RTOL};

/// Constraint tolerance for points of `T*S^2`.
pub const SPHERE_TOL: f64 = 1e-10;

pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Signed difference `a - b` reduced to `(-pi, pi]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    Cylinder,
    TStarSphere,
    SE2Dual,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhasePoint {
    Cylinder { theta: f64, z: f64 },
    TStarSphere { x: Vector3<f64>, y: Vector3<f64> },
    SE2Dual { nu: Vector3<f64> },
}

impl PhasePoint {
    pub fn cylinder(theta: f64, z: f64) -> Self {
        PhasePoint::Cylinder { theta: wrap_angle(theta), z }
    }

    /// Point of `T*S^2`; fails unless `|x| = 1` and `<x, y> = 0` to `1e-10`.
    pub fn t_star_sphere(x: Vector3<f64>, y: Vector3<f64>) -> Result<Self> {
        if (x.norm() - 1.0).abs() > SPHERE_TOL || x.dot(&y).abs() > SPHERE_TOL {
            return Err(Error::InvalidParameter(format!(
                "not in T*S^2: |x| - 1 = {:e}, <x,y> = {:e}",
                x.norm() - 1.0,
                x.dot(&y)
            )));
        }
        Ok(PhasePoint::TStarSphere { x, y })
    }

    /// Closest-point style retraction onto `T*S^2`.
    pub fn t_star_sphere_projected(x: Vector3<f64>, y: Vector3<f64>) -> Self {
        let x = x.normalize();
        let y = y - x * x.dot(&y);
        PhasePoint::TStarSphere { x, y }
    }

    pub fn se2_dual(nu: Vector3<f64>) -> Self {
        PhasePoint::SE2Dual { nu }
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            PhasePoint::Cylinder { .. } => SpaceKind::Cylinder,
            PhasePoint::TStarSphere { .. } => SpaceKind::TStarSphere,
            PhasePoint::SE2Dual { .. } => SpaceKind::SE2Dual,
        }
    }

    /// Ambient coordinates: `(theta, z)`, `(x, y)` in R^6, or `nu`.
    pub fn coords(&self) -> DVector<f64> {
        match self {
            PhasePoint::Cylinder { theta, z } => DVector::from_column_slice(&[*theta, *z]),
            PhasePoint::TStarSphere { x, y } => {
                DVector::from_column_slice(&[x.x, x.y, x.z, y.x, y.y, y.z])
            }
            PhasePoint::SE2Dual { nu } => DVector::from_column_slice(nu.as_slice()),
        }
    }

    /// Rebuilds a point of the same kind from ambient coordinates, normalizing
    /// the angle or retracting onto `T*S^2`.
    pub fn with_coords(&self, c: &DVector<f64>) -> Self {
        match self {
            PhasePoint::Cylinder { .. } => PhasePoint::cylinder(c[0], c[1]),
            PhasePoint::TStarSphere { .. } => PhasePoint::t_star_sphere_projected(
                Vector3::new(c[0], c[1], c[2]),
                Vector3::new(c[3], c[4], c[5]),
            ),
            PhasePoint::SE2Dual { .. } => PhasePoint::se2_dual(Vector3::new(c[0], c[1], c[2])),
        }
    }

    /// Distance in ambient coordinates, with the cylinder angle wrapped.
    /// Points of different spaces are infinitely far apart.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        match (self, other) {
            (PhasePoint::Cylinder { theta: t1, z: z1 }, PhasePoint::Cylinder { theta: t2, z: z2 }) => {
                angle_diff(*t1, *t2).hypot(z1 - z2)
            }
            (a, b) if a.kind() == b.kind() => (a.coords() - b.coords()).norm(),
            _ => f64::INFINITY,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PhasePoint::Cylinder { .. } => 2,
            PhasePoint::TStarSphere { .. } => 6,
            PhasePoint::SE2Dual { .. } => 3,
        }
    }
}

/// Symmetry metadata: the original group `G` and the subgroup `H` preserved
/// by the perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symmetry {
    pub g: GroupId,
    pub h: GroupId,
}

/// Body in a fluid, perturbed by the fluid density through `lambda = d * rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AddedMassParams {
    pub m: f64,
    pub inertia: f64,
    pub a: f64,
    pub b: f64,
    d: f64,
    c1: f64,
    c2: f64,
    c3: f64,
}

impl AddedMassParams {
    pub fn new(m: f64, inertia: f64, a: f64, b: f64) -> Result<Self> {
        if !(m > 0.0 && inertia > 0.0 && b > 0.0 && a > b) {
            return Err(Error::InvalidParameter(format!(
                "added-mass family needs m > 0, I_B > 0 and A > B > 0 (got m={m}, I_B={inertia}, A={a}, B={b})"
            )));
        }
        let d = (a * a - b * b) / m;
        Ok(Self {
            m,
            inertia,
            a,
            b,
            d,
            c1: m * m * d * PI / 4.0,
            c2: PI * (a * a - m * d) / (4.0 * d),
            c3: PI * (b * b + m * d) / (4.0 * d),
        })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn c(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    /// Fluid density corresponding to a value of the perturbation parameter.
    pub fn density(&self, lambda: f64) -> f64 {
        lambda / self.d
    }
}

/// Circular body deformed into an ellipse, `lambda = (A^2 - B^2) / B^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeParams {
    pub m: f64,
    pub inertia: f64,
    pub b: f64,
    pub rho: f64,
    d1: f64,
    d2: f64,
}

impl ShapeParams {
    pub fn new(m: f64, inertia: f64, b: f64, rho: f64) -> Result<Self> {
        if !(m > 0.0 && inertia > 0.0 && b > 0.0 && rho >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shape family needs m > 0, I_B > 0, B > 0, rho >= 0 (got m={m}, I_B={inertia}, B={b}, rho={rho})"
            )));
        }
        Ok(Self {
            m,
            inertia,
            b,
            rho,
            d1: rho * PI * b.powi(4) / 4.0,
            d2: rho * PI * b * b / 4.0,
        })
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    /// Semi-major axis `A = B sqrt(1 + lambda)`.
    pub fn semi_major(&self, lambda: f64) -> f64 {
        self.b * (1.0 + lambda).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    /// `z^2 + lambda cos(n theta)` on the cylinder.
    CylinderCos { n: u32 },
    BodyFluidAdded(AddedMassParams),
    BodyFluidShape(ShapeParams),
    /// `|y|^2 / 2 + lambda <x, e3>` on `T*S^2`.
    PendulumGravity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianFamily {
    kind: FamilyKind,
    symmetry: Symmetry,
}

impl HamiltonianFamily {
    pub fn cylinder(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("cylinder family needs n >= 1".into()));
        }
        Ok(Self {
            kind: FamilyKind::CylinderCos { n },
            symmetry: Symmetry { g: GroupId::O2, h: GroupId::Dn(n) },
        })
    }

    pub fn body_fluid_added(m: f64, inertia: f64, a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            kind: FamilyKind::BodyFluidAdded(AddedMassParams::new(m, inertia, a, b)?),
            symmetry: Symmetry { g: GroupId::O2, h: GroupId::Dn(2) },
        })
    }

    pub fn body_fluid_shape(m: f64, inertia: f64, b: f64, rho: f64) -> Result<Self> {
        Ok(Self {
            kind: FamilyKind::BodyFluidShape(ShapeParams::new(m, inertia, b, rho)?),
            symmetry: Symmetry { g: GroupId::O2, h: GroupId::Dn(2) },
        })
    }

    pub fn pendulum() -> Self {
        Self {
            kind: FamilyKind::PendulumGravity,
            symmetry: Symmetry { g: GroupId::SO3, h: GroupId::SO2 },
        }
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn space(&self) -> SpaceKind {
        match self.kind {
            FamilyKind::CylinderCos { .. } => SpaceKind::Cylinder,
            FamilyKind::BodyFluidAdded(_) | FamilyKind::BodyFluidShape(_) => SpaceKind::SE2Dual,
            FamilyKind::PendulumGravity => SpaceKind::TStarSphere,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::CylinderCos { .. } => "cylinder",
            FamilyKind::BodyFluidAdded(_) => "rigid-fluid-added",
            FamilyKind::BodyFluidShape(_) => "rigid-fluid-shape",
            FamilyKind::PendulumGravity => "pendulum",
        }
    }

    /// Inclusion of the algebra of `H` into that of `G`.
    pub fn embedding(&self) -> SubalgebraEmbedding {
        match self.kind {
            FamilyKind::PendulumGravity => SubalgebraEmbedding::so2_in_so3(Vector3::z()),
            _ => SubalgebraEmbedding::discrete(self.symmetry.g, self.symmetry.h),
        }
    }

    /// Diagonal of `(I_B + I_F)` for the body-fluid families: the
    /// Hamiltonian is `(x^2/k1 + alpha1^2/k2 + alpha2^2/k3) / 2`.
    pub fn inertia_diagonal(&self, lambda: f64) -> Result<[f64; 3]> {
        let k = match self.kind {
            FamilyKind::BodyFluidAdded(p) => [
                p.inertia + lambda * p.c1,
                p.m + lambda * p.c2,
                p.m + lambda * p.c3,
            ],
            FamilyKind::BodyFluidShape(p) => [
                p.inertia + lambda * lambda * p.d1,
                p.m + p.d2,
                p.m + (lambda + 1.0) * p.d2,
            ],
            _ => return Err(Error::SpaceMismatch(format!("{} is not a body-fluid family", self.name()))),
        };
        if k.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda} makes the inertia tensor non-positive"
            )));
        }
        Ok(k)
    }

    fn check_space(&self, p: &PhasePoint) -> Result<()> {
        if p.kind() != self.space() {
            return Err(Error::SpaceMismatch(format!(
                "family {} lives on {:?}, got a point of {:?}",
                self.name(),
                self.space(),
                p.kind()
            )));
        }
        Ok(())
    }
}

/// Value, gradient and Hessian of a function in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl Jet {
    fn sub_scaled(mut self, other: &Jet, s: f64) -> Jet {
        self.value -= s * other.value;
        self.gradient -= &other.gradient * s;
        self.hessian -= &other.hessian * s;
        self
    }
}

/// Value, ambient gradient and ambient Hessian of `h_lambda` at `p`.
pub fn energy_jet(family: &HamiltonianFamily, lambda: f64, p: &PhasePoint) -> Result<Jet> {
    family.check_space(p)?;
    match (family.kind, p) {
        (FamilyKind::CylinderCos { n }, PhasePoint::Cylinder { theta, z }) => {
            let nf = f64::from(n);
            let (s, c) = (nf * theta).sin_cos();
            Ok(Jet {
                value: z * z + lambda * c,
                gradient: DVector::from_column_slice(&[-lambda * nf * s, 2.0 * z]),
                hessian: DMatrix::from_row_slice(2, 2, &[-lambda * nf * nf * c, 0.0, 0.0, 2.0]),
            })
        }
        (FamilyKind::BodyFluidAdded(_) | FamilyKind::BodyFluidShape(_), PhasePoint::SE2Dual { nu }) => {
            let k = family.inertia_diagonal(lambda)?;
            let inv = Vector3::new(1.0 / k[0], 1.0 / k[1], 1.0 / k[2]);
            let grad = nu.component_mul(&inv);
            Ok(Jet {
                value: 0.5 * nu.dot(&grad),
                gradient: DVector::from_column_slice(grad.as_slice()),
                hessian: DMatrix::from_diagonal(&DVector::from_column_slice(inv.as_slice())),
            })
        }
        (FamilyKind::PendulumGravity, PhasePoint::TStarSphere { x, y }) => {
            let mut hess = DMatrix::zeros(6, 6);
            for i in 3..6 {
                hess[(i, i)] = 1.0;
            }
            Ok(Jet {
                value: 0.5 * y.norm_squared() + lambda * x.z,
                gradient: DVector::from_column_slice(&[0.0, 0.0, lambda, y.x, y.y, y.z]),
                hessian: hess,
            })
        }
        _ => unreachable!("space checked above"),
    }
}

/// `h_lambda(p)`.
pub fn evaluate(family: &HamiltonianFamily, lambda: f64, p: &PhasePoint) -> Result<f64> {
    Ok(energy_jet(family, lambda, p)?.value)
}

/// Intrinsic gradient: `(d/dtheta, d/dz)` on the cylinder, `dh/dnu` on
/// `se(2)*`, and the ambient gradient projected onto `T_p(T*S^2)`.
pub fn gradient(family: &HamiltonianFamily, lambda: f64, p: &PhasePoint) -> Result<DVector<f64>> {
    let jet = energy_jet(family, lambda, p)?;
    Ok(project_to_tangent(p, &jet.gradient))
}

/// Orthogonal projection of an ambient covector onto the tangent space.
pub fn project_to_tangent(p: &PhasePoint, v: &DVector<f64>) -> DVector<f64> {
    match p {
        PhasePoint::TStarSphere { .. } => {
            let b = tangent_basis(p);
            &b * (b.transpose() * v)
        }
        _ => v.clone(),
    }
}

/// Orthonormal basis of the tangent space in ambient coordinates.
pub fn tangent_basis(p: &PhasePoint) -> DMatrix<f64> {
    match p {
        PhasePoint::TStarSphere { .. } => {
            let normals = constraint_normals(p);
            linalg::nullspace(&normals.transpose(), NULLSPACE_RTOL)
        }
        _ => DMatrix::identity(p.dim(), p.dim()),
    }
}

/// Gradients of the defining constraints as columns (empty off `T*S^2`).
pub fn constraint_normals(p: &PhasePoint) -> DMatrix<f64> {
    match p {
        PhasePoint::TStarSphere { x, y } => DMatrix::from_column_slice(
            6,
            2,
            &[x.x, x.y, x.z, 0.0, 0.0, 0.0, y.x, y.y, y.z, x.x, x.y, x.z],
        ),
        _ => DMatrix::zeros(p.dim(), 0),
    }
}

/// Constraint functions `(|x|^2 - 1)/2` and `<x, y>` with their Hessians.
pub fn constraint_values(p: &PhasePoint) -> Vec<f64> {
    match p {
        PhasePoint::TStarSphere { x, y } => vec![0.5 * (x.norm_squared() - 1.0), x.dot(y)],
        _ => vec![],
    }
}

pub fn constraint_hessians(p: &PhasePoint) -> Vec<DMatrix<f64>> {
    match p {
        PhasePoint::TStarSphere { .. } => {
            let mut c1 = DMatrix::zeros(6, 6);
            let mut c2 = DMatrix::zeros(6, 6);
            for i in 0..3 {
                c1[(i, i)] = 1.0;
                c2[(i, i + 3)] = 1.0;
                c2[(i + 3, i)] = 1.0;
            }
            vec![c1, c2]
        }
        _ => vec![],
    }
}

/// Lagrange multipliers of an ambient gradient: least-squares solution of
/// `N m = g` with `N` the constraint normals.
pub fn multipliers(p: &PhasePoint, g: &DVector<f64>) -> DVector<f64> {
    let n = constraint_normals(p);
    if n.ncols() == 0 {
        return DVector::zeros(0);
    }
    let gram = n.transpose() * &n;
    gram.lu().solve(&(n.transpose() * g)).unwrap_or_else(|| DVector::zeros(n.ncols()))
}

/// Riemannian Hessian of a function on the tangent frame `tangent_basis(p)`.
pub fn intrinsic_hessian(p: &PhasePoint, jet: &Jet) -> DMatrix<f64> {
    let b = tangent_basis(p);
    let mut h = jet.hessian.clone();
    let mult = multipliers(p, &jet.gradient);
    for (m, c) in mult.iter().zip(constraint_hessians(p)) {
        h -= c * *m;
    }
    b.transpose() * h * b
}

fn levi_civita_block(i: usize) -> DMatrix<f64> {
    // (E_i)_{jk} = eps_{ijk}
    let mut e = DMatrix::zeros(3, 3);
    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
    e[(j, k)] = 1.0;
    e[(k, j)] = -1.0;
    e
}

/// Jets of the components of `Phi_G` in ambient coordinates.
pub fn momentum_jets(family: &HamiltonianFamily, p: &PhasePoint) -> Result<Vec<Jet>> {
    family.check_space(p)?;
    Ok(match p {
        PhasePoint::Cylinder { z, .. } => vec![Jet {
            value: *z,
            gradient: DVector::from_column_slice(&[0.0, 1.0]),
            hessian: DMatrix::zeros(2, 2),
        }],
        // Rotations of (alpha1, alpha2) are generated by -x under the
        // Lie-Poisson bracket.
        PhasePoint::SE2Dual { nu } => vec![Jet {
            value: -nu.x,
            gradient: DVector::from_column_slice(&[-1.0, 0.0, 0.0]),
            hessian: DMatrix::zeros(3, 3),
        }],
        PhasePoint::TStarSphere { x, y } => {
            let j = x.cross(y);
            (0..3)
                .map(|i| {
                    let e = Vector3::ith(i, 1.0);
                    let gx = y.cross(&e);
                    let gy = e.cross(x);
                    let mut hess = DMatrix::zeros(6, 6);
                    let blk = levi_civita_block(i);
                    hess.view_mut((0, 3), (3, 3)).copy_from(&blk);
                    hess.view_mut((3, 0), (3, 3)).copy_from(&blk.transpose());
                    Jet {
                        value: j[i],
                        gradient: DVector::from_column_slice(&[gx.x, gx.y, gx.z, gy.x, gy.y, gy.z]),
                        hessian: hess,
                    }
                })
                .collect()
        }
    })
}

/// `Phi_G(p)`.
pub fn momentum_g(family: &HamiltonianFamily, p: &PhasePoint) -> Result<CoalgebraVector> {
    let jets = momentum_jets(family, p)?;
    CoalgebraVector::new(
        family.symmetry.g,
        DVector::from_iterator(jets.len(), jets.iter().map(|j| j.value)),
    )
}

/// `Phi_H = i_h^* o Phi_G`.
pub fn momentum_h(family: &HamiltonianFamily, p: &PhasePoint) -> Result<CoalgebraVector> {
    family.embedding().restrict(&momentum_g(family, p)?)
}

/// Ambient Jacobian of `Phi_G` (rows indexed by the dual basis).
pub fn momentum_jacobian(family: &HamiltonianFamily, p: &PhasePoint) -> Result<DMatrix<f64>> {
    let jets = momentum_jets(family, p)?;
    let mut m = DMatrix::zeros(jets.len(), p.dim());
    for (i, j) in jets.iter().enumerate() {
        m.set_row(i, &j.gradient.transpose());
    }
    Ok(m)
}

/// A velocity in the algebra of `G` or of `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Velocity {
    xi: AlgebraVector,
}

impl Velocity {
    pub fn new(family: &HamiltonianFamily, xi: AlgebraVector) -> Result<Self> {
        let sym = family.symmetry();
        if xi.group() != sym.g && xi.group() != sym.h {
            return Err(Error::GroupMismatch { expected: sym.h, found: xi.group() });
        }
        Ok(Self { xi })
    }

    pub fn xi(&self) -> &AlgebraVector {
        &self.xi
    }

    /// The velocity as an element of the algebra of `G`.
    pub fn in_g(&self, family: &HamiltonianFamily) -> Result<AlgebraVector> {
        let sym = family.symmetry();
        if self.xi.group() == sym.g {
            Ok(self.xi.clone())
        } else {
            family.embedding().include(&self.xi)
        }
    }
}

/// Jet of the augmented Hamiltonian `h_lambda - <Phi_G, xi>`.
pub fn augmented_jet(
    family: &HamiltonianFamily,
    lambda: f64,
    xi: &Velocity,
    p: &PhasePoint,
) -> Result<Jet> {
    let xi_g = xi.in_g(family)?;
    let mut jet = energy_jet(family, lambda, p)?;
    for (coef, mj) in xi_g.coords().iter().zip(momentum_jets(family, p)?) {
        jet = jet.sub_scaled(&mj, *coef);
    }
    Ok(jet)
}

pub fn augmented(family: &HamiltonianFamily, lambda: f64, xi: &Velocity, p: &PhasePoint) -> Result<f64> {
    let h = evaluate(family, lambda, p)?;
    let phi = pairing(&momentum_g(family, p)?, &xi.in_g(family)?)?;
    Ok(h - phi)
}

pub fn augmented_gradient(
    family: &HamiltonianFamily,
    lambda: f64,
    xi: &Velocity,
    p: &PhasePoint,
) -> Result<DVector<f64>> {
    Ok(project_to_tangent(p, &augmented_jet(family, lambda, xi, p)?.gradient))
}

/// Columns `xi_M(p)` over the basis of the algebra of `group` (either `G`
/// or `H` of the family), in ambient coordinates.
pub fn orbit_generators(family: &HamiltonianFamily, group: GroupId, p: &PhasePoint) -> Result<DMatrix<f64>> {
    family.check_space(p)?;
    let sym = family.symmetry();
    let basis: DMatrix<f64> = if group == sym.g {
        DMatrix::identity(sym.g.algebra_dim(), sym.g.algebra_dim())
    } else if group == sym.h {
        family.embedding().images().clone()
    } else {
        return Err(Error::GroupMismatch { expected: sym.g, found: group });
    };
    let mut out = DMatrix::zeros(p.dim(), basis.ncols());
    for (j, col) in basis.column_iter().enumerate() {
        let v: DVector<f64> = match p {
            PhasePoint::Cylinder { .. } => DVector::from_column_slice(&[col[0], 0.0]),
            PhasePoint::SE2Dual { nu } => DVector::from_column_slice(&[0.0, -col[0] * nu.z, col[0] * nu.y]),
            PhasePoint::TStarSphere { x, y } => {
                let w = Vector3::new(col[0], col[1], col[2]);
                let (gx, gy) = (w.cross(x), w.cross(y));
                DVector::from_column_slice(&[gx.x, gx.y, gx.z, gy.x, gy.y, gy.z])
            }
        };
        out.set_column(j, &v);
    }
    Ok(out)
}

fn planar(kind: ElementKind, v: Vector2<f64>) -> Option<(Vector2<f64>, bool)> {
    match kind {
        ElementKind::Identity => Some((v, false)),
        ElementKind::Rotation(a) => Some((Matrix2::new(a.cos(), -a.sin(), a.sin(), a.cos()) * v, false)),
        ElementKind::Reflection(a) => {
            let (s, c) = (2.0 * a).sin_cos();
            Some((Matrix2::new(c, s, s, -c) * v, true))
        }
        ElementKind::Matrix(_) => None,
    }
}

/// Action of a group element on a phase point.
///
/// - cylinder: `R_phi (theta, z) = (theta + phi, z)`, `r_a (theta, z) = (2a - theta, z)`;
/// - `se(2)*`: rotations turn `(alpha1, alpha2)`, reflections also flip `x`;
/// - `T*S^2`: `A (x, y) = (A x, A y)`, with planar rotations about e3.
pub fn act(g: &GroupElement, p: &PhasePoint) -> Result<PhasePoint> {
    let incompatible = || {
        Error::SpaceMismatch(format!("{} element {:?} cannot act on {:?}", g.group(), g.kind(), p.kind()))
    };
    let planar_group = matches!(g.group(), GroupId::SO2 | GroupId::O2 | GroupId::Dn(_) | GroupId::Trivial);
    match p {
        PhasePoint::Cylinder { theta, z } => {
            if !planar_group {
                return Err(incompatible());
            }
            let t = match g.kind() {
                ElementKind::Identity => *theta,
                ElementKind::Rotation(a) => theta + a,
                ElementKind::Reflection(a) => 2.0 * a - theta,
                ElementKind::Matrix(_) => return Err(incompatible()),
            };
            Ok(PhasePoint::cylinder(t, *z))
        }
        PhasePoint::SE2Dual { nu } => {
            if !planar_group {
                return Err(incompatible());
            }
            let (al, flip) = planar(g.kind(), Vector2::new(nu.y, nu.z)).ok_or_else(incompatible)?;
            let x = if flip { -nu.x } else { nu.x };
            Ok(PhasePoint::se2_dual(Vector3::new(x, al.x, al.y)))
        }
        PhasePoint::TStarSphere { x, y } => {
            if !matches!(g.group(), GroupId::SO3 | GroupId::SO2 | GroupId::Trivial)
                || matches!(g.kind(), ElementKind::Reflection(_))
            {
                return Err(incompatible());
            }
            let a = g.matrix3();
            Ok(PhasePoint::TStarSphere { x: a * x, y: a * y })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> HamiltonianFamily {
        HamiltonianFamily::body_fluid_added(1.0, 1.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn cylinder_energy() {
        let f = HamiltonianFamily::cylinder(3).unwrap();
        let v = evaluate(&f, 0.05, &PhasePoint::cylinder(0.0, 0.0)).unwrap();
        assert_eq!(v, 0.05);
    }

    #[test]
    fn body_fluid_energy_at_lambda_zero() {
        let v = evaluate(&desk(), 0.0, &PhasePoint::se2_dual(Vector3::new(1.0, 1.0, 1.0))).unwrap();
        assert_eq!(v, 1.5);
    }

    #[test]
    fn desk_constants() {
        let FamilyKind::BodyFluidAdded(p) = *desk().kind() else { panic!() };
        let [c1, c2, c3] = p.c();
        assert_eq!(p.d(), 3.0);
        assert!((c1 - 3.0 * PI / 4.0).abs() < 1e-15);
        assert!((c2 - PI / 12.0).abs() < 1e-15);
        assert!((c3 - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pendulum_rest_points() {
        let f = HamiltonianFamily::pendulum();
        let p = PhasePoint::t_star_sphere(-Vector3::z(), Vector3::zeros()).unwrap();
        assert_eq!(evaluate(&f, 0.37, &p).unwrap(), -0.37);
        assert_eq!(momentum_h(&f, &p).unwrap().coords()[0], 0.0);
    }

    #[test]
    fn frechet_derivative_of_body_fluid() {
        let f = desk();
        let lam = 0.1;
        let nu = Vector3::new(0.3, -0.7, 1.1);
        let g = gradient(&f, lam, &PhasePoint::se2_dual(nu)).unwrap();
        let FamilyKind::BodyFluidAdded(p) = *f.kind() else { panic!() };
        let [c1, c2, c3] = p.c();
        assert!((g[0] - 0.3 / (1.0 + lam * c1)).abs() < 1e-15);
        assert!((g[1] + 0.7 / (1.0 + lam * c2)).abs() < 1e-15);
        assert!((g[2] - 1.1 / (1.0 + lam * c3)).abs() < 1e-15);
    }

    #[test]
    fn cylinder_critical_point() {
        let f = HamiltonianFamily::cylinder(3).unwrap();
        let g = gradient(&f, 0.05, &PhasePoint::cylinder(PI / 3.0, 0.0)).unwrap();
        assert!(g.norm() < 1e-15);
    }

    #[test]
    fn space_mismatch() {
        let f = HamiltonianFamily::pendulum();
        assert!(matches!(
            evaluate(&f, 0.0, &PhasePoint::cylinder(0.0, 0.0)),
            Err(Error::SpaceMismatch(_))
        ));
    }

    #[test]
    fn momentum_examples() {
        let cyl = HamiltonianFamily::cylinder(2).unwrap();
        let m = momentum_g(&cyl, &PhasePoint::cylinder(1.2, 0.7)).unwrap();
        assert_eq!(m.coords()[0], 0.7);
        let pend = HamiltonianFamily::pendulum();
        let s = 1.7;
        let p = PhasePoint::t_star_sphere(Vector3::x(), Vector3::y() * s).unwrap();
        assert_eq!(momentum_g(&pend, &p).unwrap().coords().as_slice(), &[0.0, 0.0, s]);
        assert_eq!(momentum_h(&pend, &p).unwrap().coords().as_slice(), &[s]);
    }

    #[test]
    fn augmented_with_zero_velocity() {
        let f = HamiltonianFamily::pendulum();
        let p = PhasePoint::t_star_sphere(Vector3::x(), Vector3::y()).unwrap();
        let v = Velocity::new(&f, AlgebraVector::zero(GroupId::SO2)).unwrap();
        assert_eq!(augmented(&f, 0.2, &v, &p).unwrap(), evaluate(&f, 0.2, &p).unwrap());
    }

    #[test]
    fn equatorial_relative_equilibrium_is_critical() {
        let f = HamiltonianFamily::pendulum();
        let s = 1.3;
        let p = PhasePoint::t_star_sphere(Vector3::x(), Vector3::y() * s).unwrap();
        let xi = Velocity::new(&f, AlgebraVector::from_slice(GroupId::SO3, &[0.0, 0.0, s]).unwrap()).unwrap();
        assert!(augmented_gradient(&f, 0.0, &xi, &p).unwrap().norm() < 1e-14);
    }

    #[test]
    fn velocity_group_checked() {
        let f = HamiltonianFamily::pendulum();
        assert!(Velocity::new(&f, AlgebraVector::zero(GroupId::SE2)).is_err());
    }

    #[test]
    fn actions() {
        let r = GroupElement::rotation(GroupId::O2, PI / 2.0).unwrap();
        let p = act(&r, &PhasePoint::cylinder(0.0, 1.0)).unwrap();
        assert!(p.distance(&PhasePoint::cylinder(PI / 2.0, 1.0)) < 1e-15);
        let q = act(&GroupElement::reflection(0.0), &PhasePoint::cylinder(0.4, -2.0)).unwrap();
        assert!(q.distance(&PhasePoint::cylinder(TAU - 0.4, -2.0)) < 1e-15);
        let id = GroupElement::identity(GroupId::O2);
        assert_eq!(act(&id, &PhasePoint::cylinder(0.4, 1.0)).unwrap(), PhasePoint::cylinder(0.4, 1.0));
        let bad = GroupElement::so3_axis_angle(Vector3::x(), 0.1).unwrap();
        assert!(act(&bad, &PhasePoint::cylinder(0.0, 0.0)).is_err());
    }

    #[test]
    fn tangent_frame_is_orthonormal_and_tangent() {
        let p = PhasePoint::t_star_sphere_projected(Vector3::new(0.3, -0.5, 0.8), Vector3::new(1.0, 0.2, -0.4));
        let b = tangent_basis(&p);
        assert_eq!(b.ncols(), 4);
        assert!((b.transpose() * &b - DMatrix::identity(4, 4)).amax() < 1e-12);
        assert!((constraint_normals(&p).transpose() * &b).amax() < 1e-12);
    }

    #[test]
    fn body_fluid_validation() {
        assert!(HamiltonianFamily::body_fluid_added(1.0, 1.0, 1.0, 2.0).is_err());
        assert!(HamiltonianFamily::body_fluid_added(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(HamiltonianFamily::body_fluid_shape(1.0, 1.0, 1.0, -1.0).is_err());
        let s = HamiltonianFamily::body_fluid_shape(1.0, 1.0, 1.0, 1.0).unwrap();
        let FamilyKind::BodyFluidShape(p) = *s.kind() else { panic!() };
        assert!((p.semi_major(3.0) - 2.0).abs() < 1e-15);
    }
}
