//! Equilibria and relative equilibria of `h_lambda` near a seed orbit.
//!
//! Equilibria are searched on two-dimensional phase spaces (the cylinder
//! and a coadjoint cylinder of `se(2)*`); relative equilibria on `T*S^2` by
//! a Lagrange system on the momentum level set. Solutions are clustered
//! into `H`-orbits and their number is compared with the category bound.

mod cluster;
mod continuation;
mod newton;
mod nondegeneracy;
mod systems;

use std::f64::consts::TAU;

use nalgebra::{DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catbound::{self, Bound, BoundQuery, Context, Isotropy};
use crate::error::{Error, Result};
use crate::lie::{self, CoalgebraVector, GroupElement, GroupId};
use crate::linalg::{self, Signature, NULLSPACE_RTOL, SIGNATURE_RTOL};
use crate::models::{self, FamilyKind, HamiltonianFamily, PhasePoint, SpaceKind, Velocity};
use crate::reduction;

pub use cluster::{cluster_into_h_orbits, lex_cmp, orbit_distance, Clustering, CLUSTER_TOL};
pub use continuation::{continuation, ContinuationNode, ContinuationResult, NodeOutcome};
pub use newton::{NewtonOptions, NewtonOutcome};
pub use nondegeneracy::{
    check_alpha_nondegenerate, check_g_nondegenerate, transverse_signature, AlphaNondegeneracy,
    GNondegeneracy, CRITICAL_TOL,
};
pub use systems::{equilibrium_residual, relative_equilibrium_residual};

/// Points closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-7;
/// Default residual tolerance for returned points.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Equilibria,
    /// Relative equilibria with `Phi_H = alpha`, seeded with velocity `xi0`.
    RelativeEquilibria { alpha: CoalgebraVector, xi0: Velocity },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveRequest {
    pub family: HamiltonianFamily,
    pub lambda: f64,
    pub mode: Mode,
    pub seed: PhasePoint,
    pub tube_radius: f64,
    pub multistart_count: usize,
    pub rng_seed: u64,
    pub tol: f64,
    /// Skip the alpha-nondegeneracy precondition for relative equilibria.
    pub allow_degenerate: bool,
    /// Additional starting points, e.g. solutions at a neighbouring
    /// parameter value.
    pub extra_seeds: Vec<PhasePoint>,
}

impl SolveRequest {
    pub fn equilibria(family: HamiltonianFamily, lambda: f64, seed: PhasePoint) -> Self {
        Self {
            family,
            lambda,
            mode: Mode::Equilibria,
            seed,
            tube_radius: 0.5,
            multistart_count: 16,
            rng_seed: 0,
            tol: RESIDUAL_TOL,
            allow_degenerate: false,
            extra_seeds: vec![],
        }
    }

    pub fn relative_equilibria(
        family: HamiltonianFamily,
        lambda: f64,
        alpha: CoalgebraVector,
        xi0: Velocity,
        seed: PhasePoint,
    ) -> Self {
        Self { mode: Mode::RelativeEquilibria { alpha, xi0 }, ..Self::equilibria(family, lambda, seed) }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tube_radius > 0.0) {
            return Err(Error::InvalidParameter(format!("tube radius must be > 0 (got {})", self.tube_radius)));
        }
        if self.multistart_count == 0 {
            return Err(Error::InvalidParameter("multistart count must be >= 1".into()));
        }
        if !(self.tol > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter("tolerance must be > 0 and lambda finite".into()));
        }
        if self.seed.kind() != self.family.space() {
            return Err(Error::SpaceMismatch(format!(
                "seed is a point of {:?}, family {} lives on {:?}",
                self.seed.kind(),
                self.family.name(),
                self.family.space()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub point: PhasePoint,
    pub velocity: Option<Velocity>,
    /// `|eta - xi0|` for relative equilibria.
    pub velocity_shift: Option<f64>,
    pub residual: f64,
    pub signature: Signature,
    pub stability: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Violated,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSet {
    pub lambda: f64,
    /// Sorted by coordinates.
    pub points: Vec<CriticalPoint>,
    pub clustering: Clustering,
    pub query: BoundQuery,
    pub bound: Bound,
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
}

impl CriticalSet {
    pub fn orbit_count(&self) -> usize {
        self.clustering.clusters.len()
    }

    pub fn representatives(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.clustering.representatives.iter().map(|&i| &self.points[i])
    }
}

/// The category-bound query for a family and search mode at `seed`.
pub fn bound_query(family: &HamiltonianFamily, mode: &Mode, seed: &PhasePoint) -> Result<BoundQuery> {
    let sym = family.symmetry();
    match (family.kind(), mode) {
        (FamilyKind::CylinderCos { .. } | FamilyKind::BodyFluidAdded(_) | FamilyKind::BodyFluidShape(_), Mode::Equilibria) => {
            // The unperturbed critical circle has isotropy generated by one
            // reflection.
            Ok(BoundQuery { g: sym.g, h: sym.h, isotropy: Isotropy::Reflection, context: Context::Equilibria })
        }
        (_, Mode::RelativeEquilibria { .. }) => {
            let mu = models::momentum_g(family, seed)?;
            let g_mu_dim = lie::stabilizer_algebra(&mu)?.dim();
            let g_mu = match (sym.g, g_mu_dim) {
                (GroupId::SO3, 1) => GroupId::SO2,
                (g, d) if d == g.algebra_dim() => g,
                _ => return Err(Error::NoTableEntry(format!("stabilizer of {mu:?} in {}", sym.g))),
            };
            let gens = models::orbit_generators(family, sym.g, seed)?;
            let isotropy = if linalg::rank(&gens, NULLSPACE_RTOL) == sym.g.algebra_dim() {
                Isotropy::Trivial
            } else {
                return Err(Error::NoTableEntry("non-discrete isotropy at the seed".into()));
            };
            Ok(BoundQuery { g: sym.g, h: sym.h, isotropy, context: Context::RelativeEquilibria { g_mu } })
        }
        (FamilyKind::PendulumGravity, Mode::Equilibria) => Err(Error::NoTableEntry(format!(
            "equilibria of the {} family",
            family.name()
        ))),
    }
}

fn dedupe(mut found: Vec<(PhasePoint, Option<Velocity>, f64)>) -> Vec<(PhasePoint, Option<Velocity>, f64)> {
    let mut out: Vec<(PhasePoint, Option<Velocity>, f64)> = Vec::new();
    for cand in found.drain(..) {
        if !out.iter().any(|q| q.0.distance(&cand.0) <= DEDUP_TOL) {
            out.push(cand);
        }
    }
    out.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    out
}

fn finish(
    req: &SolveRequest,
    points: Vec<CriticalPoint>,
    mut diagnostics: Vec<String>,
) -> Result<CriticalSet> {
    let pts: Vec<PhasePoint> = points.iter().map(|c| c.point).collect();
    let clustering = cluster_into_h_orbits(&pts, &req.family)?;
    let query = bound_query(&req.family, &req.mode, &req.seed)?;
    let bound = catbound::bound(&query)?;
    let verdict = if clustering.clusters.len() >= bound.value as usize { Verdict::Satisfied } else { Verdict::Violated };
    if points.is_empty() {
        diagnostics.push("no start point converged inside the tube".into());
    }
    Ok(CriticalSet { lambda: req.lambda, points, clustering, query, bound, verdict, diagnostics })
}

/// Equilibria of `h_lambda` in a tube around the critical `G`-orbit of
/// `h_0` through `req.seed`.
pub fn find_equilibria(req: &SolveRequest) -> Result<CriticalSet> {
    req.validate()?;
    if req.mode != Mode::Equilibria {
        return Err(Error::InvalidParameter("find_equilibria needs the equilibria mode".into()));
    }
    systems::require_space(&req.family, &[SpaceKind::Cylinder, SpaceKind::SE2Dual], "equilibrium search")?;
    let chart = systems::EqChart::for_seed(&req.seed)?;
    let seed_nd = check_g_nondegenerate(&req.family, &req.seed, None)?;
    if !seed_nd.nondegenerate {
        let max = seed_nd.eigenvalues.iter().fold(0.0_f64, |a, e| a.max(e.abs()));
        let min = seed_nd.eigenvalues.iter().fold(f64::INFINITY, |a, e| a.min(e.abs()));
        return Err(Error::DegenerateSeed { ratio: if max > 0.0 { min / max } else { 0.0 } });
    }
    if req.lambda == 0.0 {
        return Err(Error::ContinuumAtZero);
    }
    // Fails early on parameters outside the family's domain.
    chart.system(&req.family, req.lambda, &chart.coords(&req.seed))?;

    let u0 = chart.coords(&req.seed);
    let height0 = u0[1];
    let mut rng = ChaCha8Rng::seed_from_u64(req.rng_seed);
    let n = req.multistart_count;
    let mut starts: Vec<DVector<f64>> = (0..n)
        .map(|k| {
            let jitter: f64 = rng.gen_range(-1.0..1.0);
            DVector::from_column_slice(&[
                u0[0] + TAU * k as f64 / n as f64,
                height0 + 0.1 * req.tube_radius * jitter,
            ])
        })
        .collect();
    starts.extend(req.extra_seeds.iter().filter(|p| p.kind() == req.seed.kind()).map(|p| chart.coords(p)));

    let opts = NewtonOptions { accept_tol: req.tol, ..NewtonOptions::default() };
    let outcomes: Vec<Result<NewtonOutcome>> = starts
        .par_iter()
        .map(|u| newton::solve(|v| chart.system(&req.family, req.lambda, v), u.clone(), &opts))
        .collect();

    let mut diagnostics = Vec::new();
    let mut found = Vec::new();
    let (mut diverged, mut outside, mut rejected) = (0, 0, 0);
    for out in outcomes {
        let out = out?;
        if !out.converged {
            diverged += 1;
            continue;
        }
        let p = chart.point(&out.x);
        if (chart.coords(&p)[1] - height0).abs() > req.tube_radius {
            outside += 1;
            continue;
        }
        let residual = equilibrium_residual(&req.family, req.lambda, &p)?;
        if residual > req.tol {
            rejected += 1;
            continue;
        }
        found.push((p, None, residual));
    }
    if diverged + outside + rejected > 0 {
        diagnostics.push(format!(
            "{} starts: {diverged} did not converge, {outside} left the tube, {rejected} failed the residual check",
            starts.len()
        ));
    }

    let mut points = Vec::new();
    for (p, _, residual) in dedupe(found) {
        let td = systems::tangent_data(&req.family, req.lambda, None, &p)?;
        let (signature, _) = linalg::symmetric_signature(&td.hessian, SIGNATURE_RTOL);
        let stability = match p {
            PhasePoint::SE2Dual { nu } => {
                reduction::classify_fixed_point(&req.family, req.lambda, &nu)?.kind.to_string()
            }
            _ if signature.is_positive_definite() => "stable".to_string(),
            _ => "unstable".to_string(),
        };
        points.push(CriticalPoint { point: p, velocity: None, velocity_shift: None, residual, signature, stability });
    }
    finish(req, points, diagnostics)
}

fn h_coords_of(family: &HamiltonianFamily, xi: &Velocity) -> Result<DVector<f64>> {
    let sym = family.symmetry();
    if xi.xi().group() == sym.h {
        return Ok(xi.xi().coords().clone());
    }
    // Least-squares coordinates of a G-velocity in the basis of h.
    let images = family.embedding().images().clone();
    let gram = images.transpose() * &images;
    gram.lu()
        .solve(&(images.transpose() * xi.xi().coords()))
        .ok_or_else(|| Error::InvalidParameter("degenerate subalgebra embedding".into()))
}

/// Relative equilibria with `Phi_H = alpha` near the unperturbed relative
/// equilibrium `(req.seed, xi0)`.
pub fn find_relative_equilibria(req: &SolveRequest) -> Result<CriticalSet> {
    req.validate()?;
    let Mode::RelativeEquilibria { alpha, xi0 } = &req.mode else {
        return Err(Error::InvalidParameter("find_relative_equilibria needs the relative-equilibria mode".into()));
    };
    systems::require_space(&req.family, &[SpaceKind::TStarSphere], "relative-equilibrium search")?;
    let sym = req.family.symmetry();
    if alpha.group() != sym.h {
        return Err(Error::GroupMismatch { expected: sym.h, found: alpha.group() });
    }
    let mut diagnostics = Vec::new();
    if !req.allow_degenerate {
        let nd = check_alpha_nondegenerate(&req.family, &req.seed, xi0)?;
        if !nd.holds {
            return Err(Error::NotAlphaNondegenerate);
        }
    } else {
        diagnostics.push("alpha-nondegeneracy precondition skipped".into());
    }

    // Level set reachable within the tube (first-order estimate).
    let phi = models::momentum_h(&req.family, &req.seed)?;
    let distance = (phi.coords() - alpha.coords()).norm();
    let frame = models::tangent_basis(&req.seed);
    let slope = (req.family.embedding().images().transpose() * models::momentum_jacobian(&req.family, &req.seed)? * frame).norm();
    if distance > req.tube_radius * slope {
        return Err(Error::EmptyLevelSet { distance });
    }

    let eta_basis = lie::stabilizer_algebra(alpha)?.basis().clone();
    let system = systems::ReSystem { family: &req.family, lambda: req.lambda, alpha: alpha.coords().clone(), eta_basis };
    let xi_h = h_coords_of(&req.family, xi0)?;

    let mut rng = ChaCha8Rng::seed_from_u64(req.rng_seed);
    let n = req.multistart_count;
    let mut starts: Vec<PhasePoint> = Vec::with_capacity(n);
    for k in 0..n {
        let g = GroupElement::rotation(sym.h, TAU * k as f64 / n as f64)?;
        let base = models::act(&g, &req.seed)?;
        let PhasePoint::TStarSphere { x, y } = base else { unreachable!() };
        let mut jitter = || Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (jx, jy) = (jitter(), jitter());
        let scale = 0.1 * req.tube_radius / 3f64.sqrt();
        starts.push(PhasePoint::t_star_sphere_projected(x + jx * scale, y + jy * scale));
    }
    starts.extend(req.extra_seeds.iter().copied().filter(|p| p.kind() == SpaceKind::TStarSphere));

    let opts = NewtonOptions { accept_tol: req.tol, ..NewtonOptions::default() };
    let outcomes: Vec<Result<NewtonOutcome>> = starts
        .par_iter()
        .map(|p| {
            let u0 = system.initial(p, &xi_h)?;
            newton::solve(|u| system.eval(u), u0, &opts)
        })
        .collect();

    let xi0_h = lie::AlgebraVector::new(sym.h, xi_h.clone())?;
    let mut found = Vec::new();
    let (mut diverged, mut outside, mut rejected) = (0, 0, 0);
    for out in outcomes {
        let out = out?;
        if !out.converged {
            diverged += 1;
            continue;
        }
        let (raw, eta, _) = system.split(&out.x);
        let PhasePoint::TStarSphere { x, y } = raw else { unreachable!() };
        let p = PhasePoint::t_star_sphere_projected(x, y);
        let v = system.velocity(&eta)?;
        if orbit_distance(sym.h, &req.seed, &p)? > req.tube_radius {
            outside += 1;
            continue;
        }
        let residual = relative_equilibrium_residual(&req.family, req.lambda, &v, alpha, &p)?;
        if residual > req.tol {
            rejected += 1;
            continue;
        }
        found.push((p, Some(v), residual));
    }
    if diverged + outside + rejected > 0 {
        diagnostics.push(format!(
            "{} starts: {diverged} did not converge, {outside} left the tube, {rejected} failed the residual check",
            starts.len()
        ));
    }

    let mut points = Vec::new();
    for (p, v, residual) in dedupe(found) {
        let v = v.expect("relative equilibria carry a velocity");
        let nd = nondegeneracy::alpha_analysis(&req.family, req.lambda, &p, &v, CRITICAL_TOL)?;
        let stability = if nd.signature.is_positive_definite() { "stable" } else { "indefinite" };
        let shift = (v.xi().coords() - xi0_h.coords()).norm();
        points.push(CriticalPoint {
            point: p,
            velocity: Some(v),
            velocity_shift: Some(shift),
            residual,
            signature: nd.signature,
            stability: stability.into(),
        });
    }
    finish(req, points, diagnostics)
}

/// Dispatches on the request mode.
pub fn solve(req: &SolveRequest) -> Result<CriticalSet> {
    match req.mode {
        Mode::Equilibria => find_equilibria(req),
        Mode::RelativeEquilibria { .. } => find_relative_equilibria(req),
    }
}
