//! Lie-Poisson dynamics of the body-fluid system on `se(2)*`.
//!
//! With `I_B + I_F = diag(k1, k2, k3)` the reduced equations read
//!
//! ```text
//! x'      = alpha1 alpha2 (1/k3 - 1/k2)
//! alpha1' =  x alpha2 / k1
//! alpha2' = -x alpha1 / k1
//! ```
//!
//! which is `ad*_{dh/dnu} nu` in the conventions of [`crate::lie`].

use std::io::Write as _;
use std::path::Path;

use nalgebra::{Matrix2, Matrix3, Matrix3x2, Vector2, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{FamilyKind, HamiltonianFamily};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LPState {
    pub t: f64,
    pub nu: [f64; 3],
}

impl LPState {
    pub fn vector(&self) -> Vector3<f64> {
        Vector3::from(self.nu)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<LPState>,
    pub energies: Vec<f64>,
    pub casimirs: Vec<f64>,
    /// Largest `|h(nu(t)) - h(nu(0))|` over every step taken.
    pub energy_drift: f64,
    /// Largest `|C(nu(t)) - C(nu(0))|` over every step taken.
    pub casimir_drift: f64,
}

impl Trajectory {
    pub fn last(&self) -> &LPState {
        self.states.last().expect("trajectories are never empty")
    }

    /// CSV with columns `t,x,alpha1,alpha2,energy,casimir`, preceded by one
    /// `#` comment line.
    pub fn write_csv(&self, path: &Path, comment: &str) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(file, "# {comment}")?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["t", "x", "alpha1", "alpha2", "energy", "casimir"])
            .map_err(std::io::Error::from)?;
        for ((s, e), c) in self.states.iter().zip(&self.energies).zip(&self.casimirs) {
            w.serialize((s.t, s.nu[0], s.nu[1], s.nu[2], e, c)).map_err(std::io::Error::from)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `alpha1^2 + alpha2^2`, constant on coadjoint orbits of SE(2).
pub fn casimir(nu: &Vector3<f64>) -> f64 {
    nu.y * nu.y + nu.z * nu.z
}

/// The body-fluid vector field at a fixed parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpField {
    k: [f64; 3],
}

impl LpField {
    pub fn new(family: &HamiltonianFamily, lambda: f64) -> Result<Self> {
        match family.kind() {
            FamilyKind::BodyFluidAdded(_) | FamilyKind::BodyFluidShape(_) => {
                Ok(Self { k: family.inertia_diagonal(lambda)? })
            }
            _ => Err(Error::SpaceMismatch(format!(
                "Lie-Poisson dynamics needs a body-fluid family, got {}",
                family.name()
            ))),
        }
    }

    pub fn energy(&self, nu: &Vector3<f64>) -> f64 {
        0.5 * (nu.x * nu.x / self.k[0] + nu.y * nu.y / self.k[1] + nu.z * nu.z / self.k[2])
    }

    fn skew(&self) -> f64 {
        1.0 / self.k[2] - 1.0 / self.k[1]
    }

    pub fn eval(&self, nu: &Vector3<f64>) -> Vector3<f64> {
        let (x, a1, a2) = (nu.x, nu.y, nu.z);
        Vector3::new(a1 * a2 * self.skew(), x * a2 / self.k[0], -x * a1 / self.k[0])
    }

    pub fn jacobian(&self, nu: &Vector3<f64>) -> Matrix3<f64> {
        let (x, a1, a2) = (nu.x, nu.y, nu.z);
        let (d, k1) = (self.skew(), self.k[0]);
        Matrix3::new(
            0.0, a2 * d, a1 * d,
            a2 / k1, 0.0, x / k1,
            -a1 / k1, -x / k1, 0.0,
        )
    }

    fn rk4(&self, nu: &Vector3<f64>, dt: f64) -> Vector3<f64> {
        let k1 = self.eval(nu);
        let k2 = self.eval(&(nu + k1 * (0.5 * dt)));
        let k3 = self.eval(&(nu + k2 * (0.5 * dt)));
        let k4 = self.eval(&(nu + k3 * dt));
        nu + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
    }
}

pub fn lp_vector_field(family: &HamiltonianFamily, lambda: f64, nu: &Vector3<f64>) -> Result<Vector3<f64>> {
    Ok(LpField::new(family, lambda)?.eval(nu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    /// Rescale `(alpha1, alpha2)` back onto the initial Casimir circle after
    /// every step.
    pub project_casimir: bool,
    /// Keep every `record_stride`-th state (the last state is always kept).
    pub record_stride: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self { project_casimir: false, record_stride: 1 }
    }
}

fn project_onto_circle(nu: &mut Vector3<f64>, c0: f64) {
    let r = nu.y.hypot(nu.z);
    if r > 0.0 && c0 > 0.0 {
        let s = c0.sqrt() / r;
        nu.y *= s;
        nu.z *= s;
    }
}

/// Fixed-step classical Runge-Kutta integration on `[0, t_end]`. The final
/// step is shortened so that the trajectory ends exactly at `t_end`.
pub fn integrate(
    family: &HamiltonianFamily,
    lambda: f64,
    nu0: Vector3<f64>,
    t_end: f64,
    dt: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !(t_end > 0.0 && dt > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("need T > 0 and dt > 0 (got T={t_end}, dt={dt})")));
    }
    if !nu0.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter("initial state is not finite".into()));
    }
    let field = LpField::new(family, lambda)?;
    let stride = opts.record_stride.max(1);
    let (e0, c0) = (field.energy(&nu0), casimir(&nu0));
    let mut traj = Trajectory {
        states: vec![LPState { t: 0.0, nu: nu0.into() }],
        energies: vec![e0],
        casimirs: vec![c0],
        energy_drift: 0.0,
        casimir_drift: 0.0,
    };
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut nu = nu0;
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * dt;
        let h = if i == steps { t_end - t_prev } else { dt };
        nu = field.rk4(&nu, h);
        if opts.project_casimir {
            project_onto_circle(&mut nu, c0);
        }
        let t = if i == steps { t_end } else { i as f64 * dt };
        if !nu.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteState { t, partial: Box::new(traj) });
        }
        let (e, c) = (field.energy(&nu), casimir(&nu));
        traj.energy_drift = traj.energy_drift.max((e - e0).abs());
        traj.casimir_drift = traj.casimir_drift.max((c - c0).abs());
        if i % stride == 0 || i == steps {
            traj.states.push(LPState { t, nu: nu.into() });
            traj.energies.push(e);
            traj.casimirs.push(c);
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedPointKind {
    Center,
    Saddle,
    Degenerate,
}

impl std::fmt::Display for FixedPointKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FixedPointKind::Center => "center",
            FixedPointKind::Saddle => "saddle",
            FixedPointKind::Degenerate => "degenerate",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub kind: FixedPointKind,
    pub eigenvalues: [Complex64; 2],
    /// Linearization in the orthonormal frame `(d/dx, d/dpsi)` of the
    /// coadjoint cylinder.
    pub linearization: Matrix2<f64>,
    frame: Matrix3x2<f64>,
}

impl FixedPoint {
    /// Unit ambient vector along the unstable direction of a saddle.
    pub fn unstable_direction(&self) -> Option<Vector3<f64>> {
        if self.kind != FixedPointKind::Saddle {
            return None;
        }
        let l = &self.linearization;
        let sigma = self.eigenvalues[0].re.max(self.eigenvalues[1].re);
        let v1 = Vector2::new(l[(0, 1)], sigma - l[(0, 0)]);
        let v2 = Vector2::new(sigma - l[(1, 1)], l[(1, 0)]);
        let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
        Some((self.frame * v).normalize())
    }
}

/// Classifies an equilibrium by the linearization restricted to its
/// coadjoint cylinder.
pub fn classify_fixed_point(family: &HamiltonianFamily, lambda: f64, nu: &Vector3<f64>) -> Result<FixedPoint> {
    let field = LpField::new(family, lambda)?;
    let residual = field.eval(nu).norm();
    if residual > 1e-10 * nu.norm_squared().max(1.0) {
        return Err(Error::NotEquilibrium { residual });
    }
    let r = nu.y.hypot(nu.z);
    let frame = if r > 0.0 {
        Matrix3x2::new(1.0, 0.0, 0.0, -nu.z / r, 0.0, nu.y / r)
    } else {
        // Singular orbit: a point, no tangent plane. Report it as degenerate.
        Matrix3x2::zeros()
    };
    let l = frame.transpose() * field.jacobian(nu) * frame;
    let (tr, det) = (l.trace(), l.determinant());
    let disc = 0.25 * tr * tr - det;
    let sq = Complex64::new(disc, 0.0).sqrt();
    let half = Complex64::new(0.5 * tr, 0.0);
    let mut eig = [half + sq, half - sq];
    eig.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let scale = l.norm_squared();
    let kind = if r == 0.0 || det.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) || scale == 0.0 {
        FixedPointKind::Degenerate
    } else if det < 0.0 {
        FixedPointKind::Saddle
    } else if disc < 0.0 {
        FixedPointKind::Center
    } else {
        FixedPointKind::Degenerate
    };
    Ok(FixedPoint { kind, eigenvalues: eig, linearization: l, frame })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeteroclinicOptions {
    pub offset: f64,
    pub ball_radius: f64,
    pub dt: f64,
    pub t_max: f64,
}

impl Default for HeteroclinicOptions {
    fn default() -> Self {
        Self { offset: 1e-6, ball_radius: 1e-4, dt: 1e-3, t_max: 1000.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub label: String,
    pub from: usize,
    pub to: Option<usize>,
    pub time: Option<f64>,
    /// Closest approach to any other saddle.
    pub closest: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeteroclinicReport {
    pub applicable: bool,
    pub note: String,
    pub saddles: Vec<[f64; 3]>,
    pub branches: Vec<Branch>,
    pub connections: usize,
    /// `|h(S_0) - h(S_1)|` for the first two saddles.
    pub energy_gap: f64,
}

/// Candidate equilibria on the Casimir level `c`: `x = 0` with `alpha` on a
/// coordinate axis.
pub fn cylinder_equilibria(casimir_level: f64) -> Vec<Vector3<f64>> {
    let a = casimir_level.sqrt();
    vec![
        Vector3::new(0.0, a, 0.0),
        Vector3::new(0.0, 0.0, a),
        Vector3::new(0.0, -a, 0.0),
        Vector3::new(0.0, 0.0, -a),
    ]
}

/// Shoots along both branches of the unstable manifold of every saddle on
/// the coadjoint cylinder `C = casimir_level` and records which branches
/// reach a small ball around another saddle.
pub fn detect_heteroclinic(
    family: &HamiltonianFamily,
    lambda: f64,
    casimir_level: f64,
    opts: &HeteroclinicOptions,
) -> Result<HeteroclinicReport> {
    let field = LpField::new(family, lambda)?;
    let mut report = HeteroclinicReport {
        applicable: false,
        note: String::new(),
        saddles: vec![],
        branches: vec![],
        connections: 0,
        energy_gap: 0.0,
    };
    if !(casimir_level > 0.0) {
        report.note = "singular coadjoint orbit: no cylinder".into();
        return Ok(report);
    }
    let mut saddles = Vec::new();
    for nu in cylinder_equilibria(casimir_level) {
        let fp = classify_fixed_point(family, lambda, &nu)?;
        if fp.kind == FixedPointKind::Saddle {
            saddles.push((nu, fp.unstable_direction().expect("saddle")));
        }
    }
    report.saddles = saddles.iter().map(|(s, _)| (*s).into()).collect();
    if saddles.len() < 2 {
        report.note = format!("{} saddle(s) on the cylinder, need two", saddles.len());
        return Ok(report);
    }
    report.applicable = true;
    report.energy_gap = (field.energy(&saddles[0].0) - field.energy(&saddles[1].0)).abs();

    let jobs: Vec<(usize, f64)> = (0..saddles.len()).flat_map(|i| [(i, 1.0), (i, -1.0)]).collect();
    report.branches = jobs
        .par_iter()
        .map(|&(i, sign)| {
            let targets: Vec<(usize, Vector3<f64>)> =
                saddles.iter().enumerate().filter(|(j, _)| *j != i).map(|(j, s)| (j, s.0)).collect();
            let mut nu = saddles[i].0 + saddles[i].1 * (sign * opts.offset);
            let mut t = 0.0;
            let mut closest = f64::INFINITY;
            let mut hit = None;
            while t < opts.t_max {
                nu = field.rk4(&nu, opts.dt);
                project_onto_circle(&mut nu, casimir_level);
                t += opts.dt;
                for (j, s) in &targets {
                    let d = (nu - s).norm();
                    closest = closest.min(d);
                    if d < opts.ball_radius {
                        hit = Some((*j, t));
                    }
                }
                if hit.is_some() || !nu.iter().all(|v| v.is_finite()) {
                    break;
                }
            }
            Branch {
                label: format!("S{}{}", i, if sign > 0.0 { '+' } else { '-' }),
                from: i,
                to: hit.map(|h| h.0),
                time: hit.map(|h| h.1),
                closest,
            }
        })
        .collect();
    report.connections = report.branches.iter().filter(|b| b.to.is_some()).count();
    report.note = format!("{} of {} unstable branches connect", report.connections, report.branches.len());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> HamiltonianFamily {
        HamiltonianFamily::body_fluid_added(1.0, 1.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn field_examples() {
        let f = desk();
        assert_eq!(lp_vector_field(&f, 0.0, &Vector3::new(1.0, 1.0, 0.0)).unwrap(), Vector3::new(0.0, 0.0, -1.0));
        assert_eq!(lp_vector_field(&f, 0.3, &Vector3::new(0.0, 1.0, 0.0)).unwrap(), Vector3::zeros());
        assert_eq!(lp_vector_field(&f, 0.0, &Vector3::new(0.4, 2.0, -3.0)).unwrap().x, 0.0);
        assert!(lp_vector_field(&HamiltonianFamily::pendulum(), 0.0, &Vector3::zeros()).is_err());
    }

    #[test]
    fn casimir_examples() {
        assert_eq!(casimir(&Vector3::new(5.0, 3.0, 4.0)), 25.0);
        assert_eq!(casimir(&Vector3::new(2.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn equilibrium_stays_put() {
        let tr = integrate(&desk(), 0.1, Vector3::new(0.0, 0.0, 1.0), 1.0, 1e-3, &IntegrateOptions::default())
            .unwrap();
        assert!((tr.last().vector() - Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-13);
        assert_eq!(tr.last().t, 1.0);
    }

    #[test]
    fn classification_at_desk_parameters() {
        let f = desk();
        for (nu, kind) in [
            (Vector3::new(0.0, 1.0, 0.0), FixedPointKind::Saddle),
            (Vector3::new(0.0, -1.0, 0.0), FixedPointKind::Saddle),
            (Vector3::new(0.0, 0.0, 1.0), FixedPointKind::Center),
            (Vector3::new(0.0, 0.0, -1.0), FixedPointKind::Center),
        ] {
            let fp = classify_fixed_point(&f, 0.1, &nu).unwrap();
            assert_eq!(fp.kind, kind);
            assert!((fp.eigenvalues[0] + fp.eigenvalues[1]).norm() < 1e-14);
            let unperturbed = classify_fixed_point(&f, 0.0, &nu).unwrap();
            assert_eq!(unperturbed.kind, FixedPointKind::Degenerate);
        }
        assert!(matches!(
            classify_fixed_point(&f, 0.1, &Vector3::new(1.0, 1.0, 0.0)),
            Err(Error::NotEquilibrium { .. })
        ));
    }

    #[test]
    fn no_saddles_without_perturbation() {
        let r = detect_heteroclinic(&desk(), 0.0, 1.0, &HeteroclinicOptions::default()).unwrap();
        assert!(!r.applicable);
    }

    #[test]
    fn invalid_step() {
        assert!(integrate(&desk(), 0.0, Vector3::zeros(), 1.0, 0.0, &IntegrateOptions::default()).is_err());
    }
}
