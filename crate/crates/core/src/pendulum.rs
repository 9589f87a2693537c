//! Closed-form layer for the spherical pendulum `h = |y|^2/2 + lambda x3` on
//! `T*S^2` with the SO(2) symmetry about the vertical axis.
//!
//! A relative equilibrium rotating with angular velocity `r e3` sits at
//! height `x3 = -lambda / r^2` with `y = r e3 x x`; its vertical momentum is
//! `s = r - lambda^2 / r^3`, i.e. `r^3 (r - s) = lambda^2`.

use std::io::Write as _;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{self, HamiltonianFamily, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EMPoint {
    pub energy: f64,
    pub momentum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub r: f64,
    /// `|lambda| < r^2`, needed for the height `-lambda/r^2` to lie on the
    /// sphere.
    pub valid: bool,
}

/// Root `r >= s` of `r^3 (r - s) = lambda^2` by 80 bisection steps on
/// `[s, s + 1 + |lambda|]`.
pub fn solve_r(s: f64, lambda: f64) -> Result<RootResult> {
    if !(s > 0.0 && s.is_finite() && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("solve_r needs s > 0 (got s={s})")));
    }
    let g = |r: f64| r * r * r * (r - s) - lambda * lambda;
    let (mut lo, mut hi) = (s, s + 1.0 + lambda.abs());
    if lambda == 0.0 {
        return Ok(RootResult { r: s, valid: true });
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r = if g(lo).abs() <= g(hi).abs() { lo } else { hi };
    Ok(RootResult { r, valid: lambda.abs() < r * r })
}

/// The relative equilibrium with velocity `r e3` and azimuth 0.
pub fn relative_equilibrium(r: f64, lambda: f64) -> Result<PhasePoint> {
    let z = -lambda / (r * r);
    if !(z.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("|lambda| = {} >= r^2 = {}", lambda.abs(), r * r)));
    }
    let rho = (1.0 - z * z).sqrt();
    let x = Vector3::new(rho, 0.0, z);
    let y = Vector3::z().cross(&x) * r;
    Ok(PhasePoint::TStarSphere { x, y })
}

/// `F_lambda = (h_lambda, Phi_H)`.
pub fn energy_momentum(lambda: f64, p: &PhasePoint) -> Result<EMPoint> {
    let PhasePoint::TStarSphere { x, y } = p else {
        return Err(Error::SpaceMismatch("energy-momentum map lives on T*S^2".into()));
    };
    PhasePoint::t_star_sphere(*x, *y)?;
    let family = HamiltonianFamily::pendulum();
    Ok(EMPoint {
        energy: models::evaluate(&family, lambda, p)?,
        momentum: x.x * y.y - x.y * y.x,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationCurve {
    pub lambda: f64,
    pub samples: Vec<(f64, EMPoint)>,
}

/// `gamma(s) = ((s^4 - 3 lambda^2) / (2 s^2), s - lambda^2 / s^3)`, the image
/// of the relative equilibria with angular velocity `s`.
pub fn gamma(lambda: f64, s: f64) -> EMPoint {
    let l2 = lambda * lambda;
    EMPoint { energy: (s.powi(4) - 3.0 * l2) / (2.0 * s * s), momentum: s - l2 / s.powi(3) }
}

pub fn bifurcation_curve(lambda: f64, s_grid: &[f64]) -> Result<BifurcationCurve> {
    if let Some(bad) = s_grid.iter().find(|s| **s == 0.0 || !s.is_finite()) {
        return Err(Error::InvalidParameter(format!("s grid contains {bad}; s = 0 is a pole")));
    }
    Ok(BifurcationCurve { lambda, samples: s_grid.iter().map(|&s| (s, gamma(lambda, s))).collect() })
}

/// 64 log-spaced samples in `[0.2, 4]`.
pub fn default_s_grid() -> Vec<f64> {
    let (a, b, n) = (0.2_f64.ln(), 4.0_f64.ln(), 64);
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Images of the rank-zero points `(-e3, 0)` and `(e3, 0)` with their
/// Williamson types.
pub fn rank_zero_points(lambda: f64) -> [(EMPoint, &'static str); 2] {
    [
        (EMPoint { energy: -lambda, momentum: 0.0 }, "elliptic-elliptic"),
        (EMPoint { energy: lambda, momentum: 0.0 }, "focus-focus"),
    ]
}

/// Writes `s,energy,momentum,kind`: one `rank-one` row per grid value and
/// the two labelled rank-zero points (with an empty `s`).
pub fn emit_diagram(lambda: f64, s_grid: &[f64], path: &Path) -> Result<()> {
    let curve = bifurcation_curve(lambda, s_grid)?;
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "# energy-momentum bifurcation diagram, lambda = {lambda}")?;
    let mut w = csv::Writer::from_writer(file);
    let io = std::io::Error::from;
    w.write_record(["s", "energy", "momentum", "kind"]).map_err(io)?;
    for (s, p) in &curve.samples {
        w.write_record([s.to_string(), p.energy.to_string(), p.momentum.to_string(), "rank-one".into()])
            .map_err(io)?;
    }
    for (p, kind) in rank_zero_points(lambda) {
        w.write_record([String::new(), p.energy.to_string(), p.momentum.to_string(), kind.into()])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_root() {
        assert_eq!(solve_r(1.3, 0.0).unwrap().r, 1.3);
    }

    #[test]
    fn desk_root() {
        let r = solve_r(1.0, 0.1).unwrap();
        assert!(r.valid);
        assert!((r.r.powi(4) - r.r.powi(3) - 0.01).abs() <= 1e-14);
        assert!((r.r - 1.00971).abs() < 1e-5);
    }

    #[test]
    fn curve_values() {
        let p = gamma(0.0, 2.0);
        assert_eq!((p.energy, p.momentum), (2.0, 2.0));
        let q = gamma(0.1, 1.0);
        assert!((q.energy - 0.485).abs() < 1e-15 && (q.momentum - 0.99).abs() < 1e-15);
        assert!(bifurcation_curve(0.1, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn poles() {
        let up = PhasePoint::t_star_sphere(Vector3::z(), Vector3::zeros()).unwrap();
        let down = PhasePoint::t_star_sphere(-Vector3::z(), Vector3::zeros()).unwrap();
        assert_eq!(energy_momentum(0.1, &up).unwrap(), EMPoint { energy: 0.1, momentum: 0.0 });
        assert_eq!(energy_momentum(0.1, &down).unwrap(), EMPoint { energy: -0.1, momentum: 0.0 });
    }

    #[test]
    fn equator_at_rest_parameter() {
        let p = relative_equilibrium(1.0, 0.0).unwrap();
        assert_eq!(energy_momentum(0.0, &p).unwrap(), EMPoint { energy: 0.5, momentum: 1.0 });
    }

    #[test]
    fn default_grid() {
        let g = default_s_grid();
        assert_eq!(g.len(), 64);
        assert!((g[0] - 0.2).abs() < 1e-15 && (g[63] - 4.0).abs() < 1e-14);
    }
}
