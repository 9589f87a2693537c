//! Subcommands: building problems from parameters, solving, writing artifacts.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;
use serde_json::json;
use symbreak::catbound::stabilizer_in_subgroup;
use symbreak::lie::{check_r, AlgebraVector, CoalgebraVector, GroupId, SubalgebraEmbedding};
use symbreak::models::{self, HamiltonianFamily, PhasePoint, Velocity};
use symbreak::reduction::{detect_heteroclinic, integrate, HeteroclinicOptions, IntegrateOptions};
use symbreak::solver::{self, continuation, NodeOutcome, SolveRequest, Verdict};
use symbreak::pendulum;
use toml::Value;

use crate::config::{parse_grid, parse_value, ConfigFile, Params};
use crate::report::{
    write_json, write_points_csv, write_sweep_csv, write_text, Assumptions, Dynamics, Parameters,
    PersistenceReport, RegularityReport, SweepReport, SweepRow,
};

/// Desk-scale body parameters used when none are given.
const DESK_ADDED: [(&str, f64); 4] = [("m", 1.0), ("I_B", 1.0), ("A", 2.0), ("B", 1.0)];
const DESK_SHAPE: [(&str, f64); 4] = [("m", 1.0), ("I_B", 1.0), ("B", 1.0), ("rho", 1.0)];

#[derive(Debug, Parser)]
#[command(name = "symbreak", version, about = "Persistence of (relative) equilibria under symmetry breaking")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML file with one section per example; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "symbreak-out")]
    pub out: PathBuf,
    /// Seed of the multistart generator.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Residual tolerance of the solver.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Perturbation parameter.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// `z^2 + lambda cos(n theta)` on the cylinder.
    Cylinder {
        #[arg(long)]
        n: Option<u32>,
    },
    /// Ellipse in potential flow, perturbed through the added masses.
    RigidFluidAdded {
        #[arg(long)]
        m: Option<f64>,
        #[arg(long = "I_B")]
        inertia: Option<f64>,
        #[arg(long = "A")]
        a: Option<f64>,
        #[arg(long = "B")]
        b: Option<f64>,
        #[command(flatten)]
        run: FluidRun,
    },
    /// Circle deformed into an ellipse, perturbed through the shape.
    RigidFluidShape {
        #[arg(long)]
        m: Option<f64>,
        #[arg(long = "I_B")]
        inertia: Option<f64>,
        #[arg(long = "B")]
        b: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[command(flatten)]
        run: FluidRun,
    },
    /// Relative equilibria of the spherical pendulum at momentum `s`.
    Pendulum {
        #[arg(long)]
        s: Option<f64>,
    },
    /// Condition (R) for so(3) inside so(4).
    #[command(name = "regularity-so4")]
    RegularitySo4 {
        /// `rot` (first factor) or `diag` (diagonal).
        #[arg(long)]
        subalgebra: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<String>,
        /// Six components `x1,x2,x3,a1,a2,a3`.
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        /// Sets `chi = s rho`.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
    },
    /// Continuation of an example over a lambda grid.
    Sweep {
        #[arg(long)]
        example: Option<String>,
        /// `a:b:n`.
        #[arg(long = "lambda-grid")]
        lambda_grid: Option<String>,
        /// Example parameter, `key=value`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct FluidRun {
    /// Casimir radius of the coadjoint cylinder.
    #[arg(long)]
    casimir: Option<f64>,
    /// Length of the sample trajectory.
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
}

/// How a run ended, mapped to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Satisfied,
    Violated,
    /// Informational commands with no persistence verdict.
    Done,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Satisfied | Outcome::Done => 0,
            Outcome::Violated => 2,
        }
    }
}

fn put(p: &mut Params, key: &str, v: Option<Value>) {
    if let Some(v) = v {
        p.set(key, v);
    }
}

fn float(v: Option<f64>) -> Option<Value> {
    v.map(Value::Float)
}

fn apply_common(p: &mut Params, c: &CommonArgs, with_lambda: bool) {
    put(p, "seed", c.seed.map(|s| Value::Integer(s as i64)));
    put(p, "tol", float(c.tol));
    if with_lambda {
        put(p, "lambda", float(c.lambda));
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let file = match &cli.common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let out = cli.common.out.clone();
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let example = match &cli.command {
        Command::Cylinder { .. } => "cylinder",
        Command::RigidFluidAdded { .. } => "rigid-fluid-added",
        Command::RigidFluidShape { .. } => "rigid-fluid-shape",
        Command::Pendulum { .. } => "pendulum",
        Command::RegularitySo4 { .. } => "regularity-so4",
        Command::Sweep { .. } => "sweep",
    };
    let mut p = file.section(example);
    match &cli.command {
        Command::Cylinder { n } => put(&mut p, "n", n.map(|n| Value::Integer(n.into()))),
        Command::RigidFluidAdded { m, inertia, a, b, run } => {
            for (k, v) in [("m", m), ("I_B", inertia), ("A", a), ("B", b)] {
                put(&mut p, k, float(*v));
            }
            fluid_flags(&mut p, run);
        }
        Command::RigidFluidShape { m, inertia, b, rho, run } => {
            for (k, v) in [("m", m), ("I_B", inertia), ("B", b), ("rho", rho)] {
                put(&mut p, k, float(*v));
            }
            fluid_flags(&mut p, run);
        }
        Command::Pendulum { s } => put(&mut p, "s", float(*s)),
        Command::RegularitySo4 { subalgebra, chi, rho, xi, s } => {
            put(&mut p, "subalgebra", subalgebra.clone().map(Value::String));
            for (k, v) in [("chi", chi), ("rho", rho), ("xi", xi)] {
                put(&mut p, k, v.clone().map(Value::String));
            }
            put(&mut p, "s", float(*s));
        }
        Command::Sweep { example, lambda_grid, .. } => {
            put(&mut p, "example", example.clone().map(Value::String));
            put(&mut p, "lambda-grid", lambda_grid.clone().map(Value::String));
        }
    }
    match &cli.command {
        Command::RegularitySo4 { .. } => {
            if cli.common.seed.is_some() || cli.common.tol.is_some() || cli.common.lambda.is_some() {
                bail!("regularity-so4 takes no --seed, --tol or --lambda");
            }
            p.validate(example, false)?;
            run_regularity(&p, &out)
        }
        Command::Sweep { set, .. } => {
            if cli.common.lambda.is_some() {
                bail!("sweep takes its lambda values from --lambda-grid, not --lambda");
            }
            p.validate("sweep", false)?;
            let target = p.string("example")?.expect("validated");
            if !matches!(target.as_str(), "cylinder" | "rigid-fluid-added" | "rigid-fluid-shape" | "pendulum") {
                bail!("cannot sweep `{target}`");
            }
            let mut params = file.section(&target);
            params.remove("lambda");
            for kv in set {
                let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("--set expects key=value, got `{kv}`"))?;
                params.set(k.trim(), parse_value(v.trim()));
            }
            apply_common(&mut params, &cli.common, false);
            params.validate(&target, true)?;
            let grid = parse_grid(&p.string("lambda-grid")?.expect("validated"))?;
            run_sweep(&target, &params, &grid, &out)
        }
        _ => {
            apply_common(&mut p, &cli.common, true);
            p.validate(example, false)?;
            run_example(example, &p, &out)
        }
    }
}

fn fluid_flags(p: &mut Params, run: &FluidRun) {
    put(p, "casimir", float(run.casimir));
    put(p, "T", float(run.t_end));
    put(p, "dt", float(run.dt));
}

/// A solve request together with what is reported about it.
struct Problem {
    request: SolveRequest,
    parameters: Parameters,
    desk_defaults: Vec<String>,
    assumptions: Assumptions,
}

fn with_desk(p: &Params, defaults: &[(&str, f64)], used: &mut Vec<String>) -> Result<Vec<f64>> {
    defaults
        .iter()
        .map(|&(k, d)| {
            Ok(match p.f64(k)? {
                Some(v) => v,
                None => {
                    used.push(k.to_string());
                    d
                }
            })
        })
        .collect()
}

fn problem(example: &str, p: &Params, lambda: f64) -> Result<Problem> {
    let mut parameters = Parameters::new();
    let mut desk_defaults = Vec::new();
    let mut assumptions = Assumptions { ops_assumed: true, condition_r: None, stabilizer_in_subgroup: None };
    let mut request = match example {
        "cylinder" => {
            let n = p.u64("n")?.ok_or_else(|| anyhow!("missing required key `n`"))?;
            let n = u32::try_from(n).map_err(|_| anyhow!("`n` is too large"))?;
            parameters.insert("n".into(), json!(n));
            SolveRequest::equilibria(HamiltonianFamily::cylinder(n)?, lambda, PhasePoint::cylinder(0.0, 0.0))
        }
        "rigid-fluid-added" | "rigid-fluid-shape" => {
            let (family, defaults) = if example == "rigid-fluid-added" {
                let v = with_desk(p, &DESK_ADDED, &mut desk_defaults)?;
                (HamiltonianFamily::body_fluid_added(v[0], v[1], v[2], v[3])?, (DESK_ADDED, v))
            } else {
                let v = with_desk(p, &DESK_SHAPE, &mut desk_defaults)?;
                (HamiltonianFamily::body_fluid_shape(v[0], v[1], v[2], v[3])?, (DESK_SHAPE, v))
            };
            for ((k, _), v) in defaults.0.iter().zip(defaults.1) {
                parameters.insert(k.to_string(), json!(v));
            }
            let c = p.f64_or("casimir", 1.0)?;
            if !(c > 0.0) {
                bail!("`casimir` must be > 0");
            }
            parameters.insert("casimir".into(), json!(c));
            SolveRequest::equilibria(family, lambda, PhasePoint::se2_dual(Vector3::new(0.0, c, 0.0)))
        }
        "pendulum" => {
            let s = p.require_f64("s")?;
            if !(s > 0.0) {
                bail!("`s` must be > 0");
            }
            parameters.insert("s".into(), json!(s));
            let family = HamiltonianFamily::pendulum();
            let seed = PhasePoint::t_star_sphere(Vector3::x(), Vector3::y() * s)?;
            let xi0 = Velocity::new(&family, AlgebraVector::from_slice(GroupId::SO2, &[s])?)?;
            let mu = models::momentum_g(&family, &seed)?;
            assumptions.condition_r = Some(check_r(&mu, &xi0.in_g(&family)?)?.holds);
            assumptions.stabilizer_in_subgroup = stabilizer_in_subgroup(GroupId::SO3, GroupId::SO2, &mu);
            let alpha = CoalgebraVector::from_slice(GroupId::SO2, &[s])?;
            SolveRequest::relative_equilibria(family, lambda, alpha, xi0, seed)
        }
        other => bail!("`{other}` is not a persistence example"),
    };
    if let Some(seed) = p.u64("seed")? {
        request.rng_seed = seed;
    }
    if let Some(tol) = p.f64("tol")? {
        request.tol = tol;
    }
    if let Some(k) = p.u64("seeds")? {
        request.multistart_count = k as usize;
    }
    if let Some(t) = p.f64("tube")? {
        request.tube_radius = t;
    }
    parameters.insert("seed".into(), json!(request.rng_seed));
    parameters.insert("tol".into(), json!(request.tol));
    parameters.insert("seeds".into(), json!(request.multistart_count));
    parameters.insert("tube".into(), json!(request.tube_radius));
    Ok(Problem { request, parameters, desk_defaults, assumptions })
}

fn header(example: &str, lambda: f64) -> String {
    format!("symbreak {example}, lambda = {lambda}")
}

fn run_example(example: &str, p: &Params, out: &Path) -> Result<Outcome> {
    let lambda = p.require_f64("lambda")?;
    let prob = problem(example, p, lambda)?;
    let set = solver::solve(&prob.request)?;
    let mut report = PersistenceReport::new(example, prob.parameters, prob.desk_defaults, &set, prob.assumptions);
    write_points_csv(&out.join("equilibria.csv"), &header(example, lambda), &set)?;
    match example {
        "rigid-fluid-added" | "rigid-fluid-shape" => {
            let family = &prob.request.family;
            let c = p.f64_or("casimir", 1.0)?;
            let t_end = p.f64_or("T", 20.0)?;
            let dt = p.f64_or("dt", 1e-3)?;
            report.parameters.insert("T".into(), json!(t_end));
            report.parameters.insert("dt".into(), json!(dt));
            let heteroclinic = detect_heteroclinic(family, lambda, c, &HeteroclinicOptions::default())?;
            // A generic orbit on the same coadjoint cylinder.
            let angle = std::f64::consts::FRAC_PI_4;
            let nu0 = Vector3::new(0.0, c * angle.cos(), c * angle.sin());
            let stride = ((0.01 / dt).round() as usize).max(1);
            let traj = integrate(family, lambda, nu0, t_end, dt, &IntegrateOptions { record_stride: stride, ..Default::default() })?;
            traj.write_csv(&out.join("trajectory.csv"), &header(example, lambda))?;
            report.dynamics =
                Some(Dynamics { heteroclinic, energy_drift: traj.energy_drift, casimir_drift: traj.casimir_drift });
        }
        "pendulum" => {
            pendulum::emit_diagram(lambda, &pendulum::default_s_grid(), &out.join("bifurcation.csv"))?;
        }
        _ => {}
    }
    write_json(&out.join("report.json"), &report)?;
    write_text(&out.join("report.txt"), &report.summary())?;
    print!("{}", report.summary());
    Ok(match report.verdict {
        Verdict::Satisfied => Outcome::Satisfied,
        Verdict::Violated => Outcome::Violated,
    })
}

fn run_sweep(example: &str, p: &Params, grid: &[f64], out: &Path) -> Result<Outcome> {
    let prob = problem(example, p, grid.first().copied().unwrap_or(0.0))?;
    let result = continuation(&prob.request, grid)?;
    let mut rows = Vec::with_capacity(result.nodes.len());
    let mut previous: Option<usize> = None;
    let (mut failed, mut violated) = (false, false);
    for node in &result.nodes {
        let row = match &node.outcome {
            NodeOutcome::Solved(set) => {
                let count = set.orbit_count();
                let changed = previous.is_some_and(|c| c != count);
                previous = Some(count);
                violated |= set.verdict == Verdict::Violated;
                SweepRow {
                    lambda: node.lambda,
                    status: "solved".into(),
                    points: Some(set.points.len()),
                    orbits: Some(count),
                    bound: Some(set.bound.value),
                    verdict: Some(set.verdict),
                    count_changed: changed,
                    note: None,
                }
            }
            NodeOutcome::Skipped(why) | NodeOutcome::Failed(why) => {
                let is_failure = matches!(node.outcome, NodeOutcome::Failed(_));
                failed |= is_failure;
                SweepRow {
                    lambda: node.lambda,
                    status: if is_failure { "failed" } else { "skipped" }.into(),
                    points: None,
                    orbits: None,
                    bound: None,
                    verdict: None,
                    count_changed: false,
                    note: Some(why.clone()),
                }
            }
        };
        rows.push(row);
    }
    let report = SweepReport {
        example: example.to_string(),
        parameters: prob.parameters,
        desk_defaults: prob.desk_defaults,
        rows,
        predicted_orbits: result.predicted_orbits,
        persists_up_to: result.persists_up_to,
        first_change: result.first_change,
    };
    write_sweep_csv(&out.join("sweep.csv"), &format!("symbreak sweep of {example}"), &report)?;
    write_json(&out.join("report.json"), &report)?;
    write_text(&out.join("report.txt"), &report.summary())?;
    print!("{}", report.summary());
    if failed {
        bail!("at least one grid point failed to solve; see report.txt");
    }
    Ok(if violated { Outcome::Violated } else { Outcome::Satisfied })
}

fn run_regularity(p: &Params, out: &Path) -> Result<Outcome> {
    let sub = p.string("subalgebra")?.expect("validated");
    let emb = match sub.as_str() {
        "rot" => SubalgebraEmbedding::so3_rotations_in_so4(),
        "diag" => SubalgebraEmbedding::so3_diagonal_in_so4(),
        other => bail!("`subalgebra` must be `rot` or `diag`, got `{other}`"),
    };
    let rho = p.vector("rho", 3)?.expect("validated");
    let chi = match (p.vector("chi", 3)?, p.f64("s")?) {
        (Some(_), Some(_)) => bail!("give either `chi` or `s`, not both"),
        (Some(c), None) => c,
        (None, Some(s)) => rho.iter().map(|r| s * r).collect(),
        (None, None) => bail!("missing required key `chi` (or `s`)"),
    };
    let mu_coords: Vec<f64> = chi.iter().chain(&rho).copied().collect();
    let mu = CoalgebraVector::from_slice(GroupId::SO4, &mu_coords)?;
    let restricted = emb.restrict(&mu)?;
    let xi_coords: Vec<f64> = match p.vector("xi", 6)? {
        Some(x) => x,
        None => {
            // Default velocity: the natural element of the subalgebra
            // determined by mu.
            let a: Vec<f64> = restricted.coords().iter().copied().collect();
            match sub.as_str() {
                "rot" => chi.iter().copied().chain([0.0; 3]).collect(),
                _ => a.iter().chain(&a).copied().collect(),
            }
        }
    };
    let xi = AlgebraVector::from_slice(GroupId::SO4, &xi_coords)?;
    let verdict = check_r(&mu, &xi)?;
    let in_sub = match sub.as_str() {
        "rot" => xi_coords[3..].iter().all(|v| v.abs() <= 1e-12),
        _ => (0..3).all(|i| (xi_coords[i] - xi_coords[i + 3]).abs() <= 1e-12),
    };
    let report = RegularityReport {
        subalgebra: sub,
        mu: mu_coords,
        xi: xi_coords,
        restricted_momentum: restricted.coords().iter().copied().collect(),
        xi_in_subalgebra: in_sub,
        holds: verdict.holds,
        stabilizer_dim: verdict.stabilizer_dim,
        centralizer_dim: verdict.centralizer_dim,
        witness: verdict.witness.map(|w| w.coords().iter().copied().collect()),
    };
    write_json(&out.join("report.json"), &report)?;
    write_text(&out.join("report.txt"), &report.summary())?;
    print!("{}", report.summary());
    Ok(Outcome::Done)
}
