//! Independent oracles shared by the integration tests. Nothing here calls
//! into the solver; energies and vector fields are written out by hand.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

/// Energy of the cylinder family, written out independently.
pub fn cylinder_energy(n: u32, lambda: f64, theta: f64, z: f64) -> f64 {
    z * z + lambda * (n as f64 * theta).cos()
}

/// Central-difference gradient of a function of two variables.
pub fn fd_gradient2(f: impl Fn(f64, f64) -> f64, a: f64, b: f64, h: f64) -> [f64; 2] {
    [(f(a + h, b) - f(a - h, b)) / (2.0 * h), (f(a, b + h) - f(a, b - h)) / (2.0 * h)]
}

/// Body-fluid constants from `(m, I_B, A, B)`: `[k1, k2, k3]` at `lambda`.
pub fn added_mass_diagonal(m: f64, ib: f64, a: f64, b: f64, lambda: f64) -> [f64; 3] {
    let d = (a * a - b * b) / m;
    let c1 = m * m * d * PI / 4.0;
    let c2 = PI * (a * a - m * d) / (4.0 * d);
    let c3 = PI * (b * b + m * d) / (4.0 * d);
    [ib + lambda * c1, m + lambda * c2, m + lambda * c3]
}

/// Lie-Poisson field of the body-fluid system from the component formula.
pub fn lp_field(k: [f64; 3], nu: [f64; 3]) -> [f64; 3] {
    let [x, a1, a2] = nu;
    [a1 * a2 * (1.0 / k[2] - 1.0 / k[1]), x * a2 / k[0], -x * a1 / k[0]]
}

/// Local minima of `g >= 0` on a periodic-in-`u` grid over
/// `[0, 2pi) x [v0, v1]`, refined by repeated zooming, keeping those with
/// refined value below `accept`.
pub fn grid_scan_zeros(g: impl Fn(f64, f64) -> f64, v0: f64, v1: f64, n: usize, accept: f64) -> Vec<(f64, f64)> {
    let du = TAU / n as f64;
    let dv = (v1 - v0) / (n - 1) as f64;
    let vals: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| g(i as f64 * du, v0 + j as f64 * dv)).collect()).collect();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        for j in 1..n - 1 {
            let c = vals[i][j];
            let mut is_min = true;
            for di in [-1i64, 0, 1] {
                for dj in [-1i64, 0, 1] {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let ii = (i as i64 + di).rem_euclid(n as i64) as usize;
                    let jj = (j as i64 + dj) as usize;
                    // Strict on one side so plateaus give a single candidate.
                    let other = vals[ii][jj];
                    if other < c || (other == c && (di, dj) < (0, 0)) {
                        is_min = false;
                    }
                }
            }
            if !is_min {
                continue;
            }
            let (mut u, mut v) = (i as f64 * du, v0 + j as f64 * dv);
            let (mut hu, mut hv) = (du, dv);
            for _ in 0..40 {
                let mut best = (g(u, v), u, v);
                for a in -4..=4 {
                    for b in -4..=4 {
                        let (uu, vv) = (u + a as f64 * hu / 4.0, v + b as f64 * hv / 4.0);
                        let val = g(uu, vv);
                        if val < best.0 {
                            best = (val, uu, vv);
                        }
                    }
                }
                u = best.1;
                v = best.2;
                hu *= 0.5;
                hv *= 0.5;
            }
            if g(u, v) <= accept {
                let u = u.rem_euclid(TAU);
                let dup = out.iter().any(|&(a, b)| {
                    let d = (a - u).rem_euclid(TAU);
                    d.min(TAU - d).hypot(b - v) < 1e-6
                });
                if !dup {
                    out.push((u, v));
                }
            }
        }
    }
    out
}

/// Real roots of a monic polynomial `x^n + c[n-1] x^(n-1) + ... + c[0]`
/// from the eigenvalues of its companion matrix.
pub fn companion_real_roots(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i];
    }
    m.complex_eigenvalues().iter().filter(|z| z.im.abs() < 1e-9).map(|z| z.re).collect()
}

/// Positive root of `r^3 (r - s) = lambda^2` with `r >= s`, polished by
/// Newton on the quartic.
pub fn quartic_root(s: f64, lambda: f64) -> f64 {
    let mut r = companion_real_roots(&[-lambda * lambda, 0.0, 0.0, -s])
        .into_iter()
        .filter(|r| *r >= s - 1e-9)
        .fold(f64::NAN, f64::max);
    for _ in 0..5 {
        let f = r.powi(4) - s * r.powi(3) - lambda * lambda;
        let df = 4.0 * r.powi(3) - 3.0 * s * r * r;
        r -= f / df;
    }
    r
}

/// Angular distance on the circle.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}
