//! Nonlinear systems handed to Newton, and tangent-space data for the
//! nondegeneracy checks.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};
use crate::lie::{self, AlgebraVector, CoalgebraVector};
use crate::models::{self, HamiltonianFamily, Jet, PhasePoint, SpaceKind, Velocity};

/// Two-dimensional chart `(angle, height)` in which equilibria are searched:
/// `(theta, z)` on the cylinder, and `(psi, x)` on the coadjoint cylinder
/// `alpha = radius (cos psi, sin psi)` of `se(2)*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum EqChart {
    Cylinder,
    Coadjoint { radius: f64 },
}

impl EqChart {
    pub fn for_seed(p: &PhasePoint) -> Result<Self> {
        match p {
            PhasePoint::Cylinder { .. } => Ok(EqChart::Cylinder),
            PhasePoint::SE2Dual { nu } => {
                let radius = nu.y.hypot(nu.z);
                if radius == 0.0 {
                    return Err(Error::InvalidParameter(
                        "seed lies on a singular coadjoint orbit (alpha = 0)".into(),
                    ));
                }
                Ok(EqChart::Coadjoint { radius })
            }
            PhasePoint::TStarSphere { .. } => Err(Error::SpaceMismatch(
                "equilibrium search supports the cylinder and se(2)* only".into(),
            )),
        }
    }

    pub fn point(&self, u: &DVector<f64>) -> PhasePoint {
        match self {
            EqChart::Cylinder => PhasePoint::cylinder(u[0], u[1]),
            EqChart::Coadjoint { radius } => {
                PhasePoint::se2_dual(Vector3::new(u[1], radius * u[0].cos(), radius * u[0].sin()))
            }
        }
    }

    pub fn coords(&self, p: &PhasePoint) -> DVector<f64> {
        match p {
            PhasePoint::Cylinder { theta, z } => DVector::from_column_slice(&[*theta, *z]),
            PhasePoint::SE2Dual { nu } => DVector::from_column_slice(&[nu.z.atan2(nu.y), nu.x]),
            PhasePoint::TStarSphere { .. } => unreachable!("rejected in for_seed"),
        }
    }

    /// Gradient and Hessian of `h_lambda` in chart coordinates.
    pub fn system(&self, family: &HamiltonianFamily, lambda: f64, u: &DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let p = self.point(u);
        let jet = models::energy_jet(family, lambda, &p)?;
        match self {
            EqChart::Cylinder => Ok((jet.gradient, jet.hessian)),
            EqChart::Coadjoint { radius } => {
                let (s, c) = u[0].sin_cos();
                let d1 = DVector::from_column_slice(&[0.0, -radius * s, radius * c]);
                let d2 = DVector::from_column_slice(&[0.0, -radius * c, -radius * s]);
                let ex = DVector::from_column_slice(&[1.0, 0.0, 0.0]);
                let g = &jet.gradient;
                let h = &jet.hessian;
                let f = DVector::from_column_slice(&[g.dot(&d1), g[0]]);
                let hpp = (d1.transpose() * h * &d1)[0] + g.dot(&d2);
                let hpx = (d1.transpose() * h * &ex)[0];
                let j = DMatrix::from_row_slice(2, 2, &[hpp, hpx, hpx, h[(0, 0)]]);
                Ok((f, j))
            }
        }
    }
}

/// Stationarity residual evaluated directly from the model, independently
/// of any chart: `|grad h|` on the cylinder and `|ad*_{dh/dnu} nu|` on
/// `se(2)*`.
pub fn equilibrium_residual(family: &HamiltonianFamily, lambda: f64, p: &PhasePoint) -> Result<f64> {
    match p {
        PhasePoint::SE2Dual { nu } => {
            let grad = models::gradient(family, lambda, p)?;
            let xi = AlgebraVector::new(lie::GroupId::SE2, grad)?;
            let mu = CoalgebraVector::from_slice(lie::GroupId::SE2, nu.as_slice())?;
            Ok(lie::ad_star(&xi, &mu)?.norm())
        }
        _ => Ok(models::gradient(family, lambda, p)?.norm()),
    }
}

/// Tangent frame (ambient columns, orthonormal), Riemannian Hessian and
/// gradient in that frame. On `se(2)*` the frame spans the tangent plane of
/// the coadjoint orbit through `p`.
#[derive(Debug, Clone)]
pub(crate) struct TangentData {
    pub frame: DMatrix<f64>,
    pub hessian: DMatrix<f64>,
    pub gradient: DVector<f64>,
}

pub(crate) fn function_jet(
    family: &HamiltonianFamily,
    lambda: f64,
    xi: Option<&Velocity>,
    p: &PhasePoint,
) -> Result<Jet> {
    match xi {
        Some(v) => models::augmented_jet(family, lambda, v, p),
        None => models::energy_jet(family, lambda, p),
    }
}

pub(crate) fn tangent_data(
    family: &HamiltonianFamily,
    lambda: f64,
    xi: Option<&Velocity>,
    p: &PhasePoint,
) -> Result<TangentData> {
    let jet = function_jet(family, lambda, xi, p)?;
    match p {
        PhasePoint::Cylinder { .. } => Ok(TangentData {
            frame: DMatrix::identity(2, 2),
            hessian: jet.hessian,
            gradient: jet.gradient,
        }),
        PhasePoint::TStarSphere { .. } => {
            let frame = models::tangent_basis(p);
            let hessian = models::intrinsic_hessian(p, &jet);
            let gradient = frame.transpose() * &jet.gradient;
            Ok(TangentData { frame, hessian, gradient })
        }
        PhasePoint::SE2Dual { nu } => {
            let a = nu.y.hypot(nu.z);
            if a == 0.0 {
                return Ok(TangentData {
                    frame: DMatrix::zeros(3, 0),
                    hessian: DMatrix::zeros(0, 0),
                    gradient: DVector::zeros(0),
                });
            }
            let frame = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, -nu.z / a, nu.y / a]);
            let mut hessian = frame.transpose() * &jet.hessian * &frame;
            // Curvature of the circle |alpha| = a.
            let normal_slope = (jet.gradient[1] * nu.y + jet.gradient[2] * nu.z) / a;
            hessian[(1, 1)] -= normal_slope / a;
            let gradient = frame.transpose() * &jet.gradient;
            Ok(TangentData { frame, hessian, gradient })
        }
    }
}

/// Relative-equilibrium system on `T*S^2` with unknowns `(x, y, eta, m)`:
///
/// ```text
/// grad h - sum eta_j grad <Phi, w_j> - sum m_i grad c_i = 0
/// c_i = 0,   <Phi_H, b_l> - alpha_l = 0,   <t_l, dp> = 0
/// ```
///
/// where `w_j` span the stabilizer of `alpha` in `h` (as vectors of `g`),
/// `b_l` is the basis of `h` and `t_l` the matching orbit directions at the
/// current point. The last rows remove the flat directions along the
/// `H`-orbit.
pub(crate) struct ReSystem<'a> {
    pub family: &'a HamiltonianFamily,
    pub lambda: f64,
    pub alpha: DVector<f64>,
    /// Basis of `h_alpha` in `h` coordinates.
    pub eta_basis: DMatrix<f64>,
}

impl ReSystem<'_> {
    pub const NP: usize = 6;
    pub const NC: usize = 2;

    pub fn unknowns(&self) -> usize {
        Self::NP + self.eta_basis.ncols() + Self::NC
    }

    pub fn split(&self, u: &DVector<f64>) -> (PhasePoint, DVector<f64>, DVector<f64>) {
        let p = PhasePoint::TStarSphere {
            x: Vector3::new(u[0], u[1], u[2]),
            y: Vector3::new(u[3], u[4], u[5]),
        };
        let m = self.eta_basis.ncols();
        (p, u.rows(6, m).into_owned(), u.rows(6 + m, Self::NC).into_owned())
    }

    /// `eta` as an element of `h`.
    pub fn velocity(&self, eta: &DVector<f64>) -> Result<Velocity> {
        let sym = self.family.symmetry();
        Velocity::new(self.family, AlgebraVector::new(sym.h, &self.eta_basis * eta)?)
    }

    /// Initial unknowns for a seed point and velocity.
    pub fn initial(&self, p: &PhasePoint, xi_h: &DVector<f64>) -> Result<DVector<f64>> {
        let eta = self.eta_basis.transpose() * xi_h;
        let v = self.velocity(&eta)?;
        let jet = models::augmented_jet(self.family, self.lambda, &v, p)?;
        let mult = models::multipliers(p, &jet.gradient);
        let mut u = DVector::zeros(self.unknowns());
        u.rows_mut(0, 6).copy_from(&p.coords());
        u.rows_mut(6, eta.len()).copy_from(&eta);
        u.rows_mut(6 + eta.len(), Self::NC).copy_from(&mult);
        Ok(u)
    }

    pub fn eval(&self, u: &DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let (p, eta, mult) = self.split(u);
        let images = self.family.embedding().images().clone();
        let dh = images.ncols();
        let m = eta.len();
        let n = self.unknowns();
        let rows = Self::NP + Self::NC + 2 * dh;

        let energy = models::energy_jet(self.family, self.lambda, &p)?;
        let mom = models::momentum_jets(self.family, &p)?;
        let along = |w: &DVector<f64>| -> Jet {
            let mut jet = Jet { value: 0.0, gradient: DVector::zeros(6), hessian: DMatrix::zeros(6, 6) };
            for (k, mk) in mom.iter().enumerate() {
                jet.value += w[k] * mk.value;
                jet.gradient += &mk.gradient * w[k];
                jet.hessian += &mk.hessian * w[k];
            }
            jet
        };
        let eta_jets: Vec<Jet> = (0..m).map(|j| along(&(&images * self.eta_basis.column(j)))).collect();
        let h_jets: Vec<Jet> = (0..dh).map(|l| along(&images.column(l).into_owned())).collect();
        let normals = models::constraint_normals(&p);
        let c_hess = models::constraint_hessians(&p);
        let c_vals = models::constraint_values(&p);
        let gens = models::orbit_generators(self.family, self.family.symmetry().h, &p)?;

        let mut f = DVector::zeros(rows);
        let mut j = DMatrix::zeros(rows, n);

        let mut stat = energy.gradient.clone();
        let mut hess = energy.hessian.clone();
        for (k, ej) in eta_jets.iter().enumerate() {
            stat -= &ej.gradient * eta[k];
            hess -= &ej.hessian * eta[k];
            j.view_mut((0, 6 + k), (6, 1)).copy_from(&(-&ej.gradient));
        }
        for i in 0..Self::NC {
            stat -= normals.column(i) * mult[i];
            hess -= &c_hess[i] * mult[i];
            j.view_mut((0, 6 + m + i), (6, 1)).copy_from(&(-normals.column(i)));
        }
        f.rows_mut(0, 6).copy_from(&stat);
        j.view_mut((0, 0), (6, 6)).copy_from(&hess);

        for i in 0..Self::NC {
            f[6 + i] = c_vals[i];
            j.view_mut((6 + i, 0), (1, 6)).copy_from(&normals.column(i).transpose());
        }
        for (l, hj) in h_jets.iter().enumerate() {
            f[8 + l] = hj.value - self.alpha[l];
            j.view_mut((8 + l, 0), (1, 6)).copy_from(&hj.gradient.transpose());
            j.view_mut((8 + dh + l, 0), (1, 6)).copy_from(&gens.column(l).transpose());
        }
        Ok((f, j))
    }
}

/// Residual of a relative equilibrium computed from the model alone:
/// tangential part of `d h^eta` plus the momentum mismatch.
pub fn relative_equilibrium_residual(
    family: &HamiltonianFamily,
    lambda: f64,
    eta: &Velocity,
    alpha: &CoalgebraVector,
    p: &PhasePoint,
) -> Result<f64> {
    let g = models::augmented_gradient(family, lambda, eta, p)?;
    let phi = models::momentum_h(family, p)?;
    Ok(g.norm() + (phi.coords() - alpha.coords()).norm())
}

pub(crate) fn require_space(family: &HamiltonianFamily, spaces: &[SpaceKind], what: &str) -> Result<()> {
    if spaces.contains(&family.space()) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!("{what} is not available for the {} family", family.name())))
    }
}
