//! Damped Gauss-Newton iteration with an Armijo line search on `|F|^2 / 2`.
//!
//! Steps are least-squares solutions of `J d = -F` through an SVD, so
//! overdetermined systems (extra gauge rows) and locally rank-deficient
//! Jacobians are both handled.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Converged once `|F| <= ftol`.
    pub ftol: f64,
    /// A stalled iteration still counts as converged below this residual.
    pub accept_tol: f64,
    pub armijo_c: f64,
    pub backtrack: f64,
    pub min_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { max_iter: 100, ftol: 1e-12, accept_tol: 1e-10, armijo_c: 1e-4, backtrack: 0.5, min_step: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub x: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn step(f: &DVector<f64>, j: &DMatrix<f64>) -> Option<DVector<f64>> {
    let svd = j.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax > 0.0) {
        return None;
    }
    svd.solve(&(-f), 1e-13 * smax).ok()
}

/// Runs the iteration from `x0`. `system` returns the residual and its
/// Jacobian; an error from it aborts the run.
pub fn solve<S>(system: S, x0: DVector<f64>, opts: &NewtonOptions) -> Result<NewtonOutcome>
where
    S: Fn(&DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)>,
{
    let mut x = x0;
    let (mut f, mut j) = system(&x)?;
    let mut norm = f.norm();
    let mut it = 0;
    while it < opts.max_iter && norm > opts.ftol {
        it += 1;
        let Some(d) = step(&f, &j) else { break };
        let phi = 0.5 * norm * norm;
        let mut t = 1.0;
        let mut accepted = None;
        while t >= opts.min_step {
            let xt = &x + &d * t;
            let (ft, jt) = system(&xt)?;
            let nt = ft.norm();
            if nt.is_finite() && 0.5 * nt * nt <= (1.0 - 2.0 * opts.armijo_c * t) * phi {
                accepted = Some((xt, ft, jt, nt));
                break;
            }
            t *= opts.backtrack;
        }
        let Some((xt, ft, jt, nt)) = accepted else { break };
        x = xt;
        f = ft;
        j = jt;
        norm = nt;
    }
    // Polish: full steps as long as they keep reducing the residual.
    for _ in 0..3 {
        let Some(d) = step(&f, &j) else { break };
        let xt = &x + d;
        let (ft, jt) = system(&xt)?;
        let nt = ft.norm();
        if !(nt < norm) {
            break;
        }
        x = xt;
        f = ft;
        j = jt;
        norm = nt;
    }
    Ok(NewtonOutcome { converged: norm <= opts.ftol || norm <= opts.accept_tol, x, residual: norm, iterations: it })
}
