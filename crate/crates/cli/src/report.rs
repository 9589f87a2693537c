//! Machine-readable and human-readable run reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context as _, Result};
use serde::{Deserialize, Serialize};
use symbreak::linalg::Signature;
use symbreak::models::{PhasePoint, SpaceKind};
use symbreak::reduction::HeteroclinicReport;
use symbreak::solver::{CriticalSet, Verdict};

pub type Parameters = BTreeMap<String, serde_json::Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub representative: Vec<f64>,
    pub size: usize,
    /// Velocity in the Lie algebra of `H`, for relative equilibria.
    pub velocity: Option<Vec<f64>>,
    pub signature: Signature,
    pub stability: String,
    pub residual: f64,
}

/// Hypotheses attached to the bound, reported rather than proved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assumptions {
    pub ops_assumed: bool,
    /// Condition (R) at the seed; `None` for equilibria.
    pub condition_r: Option<bool>,
    /// `G_mu ⊂ H_alpha` at the seed; `None` when not applicable.
    pub stabilizer_in_subgroup: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dynamics {
    pub heteroclinic: HeteroclinicReport,
    pub energy_drift: f64,
    pub casimir_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceReport {
    pub example: String,
    pub lambda: f64,
    pub parameters: Parameters,
    /// Parameters that fell back to the desk-scale defaults.
    pub desk_defaults: Vec<String>,
    pub points_found: usize,
    pub orbits_found: usize,
    pub bound: u32,
    pub bound_citation: String,
    pub verdict: Verdict,
    pub orbits: Vec<OrbitReport>,
    pub assumptions: Assumptions,
    pub diagnostics: Vec<String>,
    pub dynamics: Option<Dynamics>,
}

impl PersistenceReport {
    pub fn new(
        example: &str,
        parameters: Parameters,
        desk_defaults: Vec<String>,
        set: &CriticalSet,
        assumptions: Assumptions,
    ) -> Self {
        let orbits = set
            .clustering
            .clusters
            .iter()
            .zip(&set.clustering.representatives)
            .map(|(members, &i)| {
                let p = &set.points[i];
                OrbitReport {
                    representative: p.point.coords().iter().copied().collect(),
                    size: members.len(),
                    velocity: p.velocity.as_ref().map(|v| v.xi().coords().iter().copied().collect()),
                    signature: p.signature,
                    stability: p.stability.clone(),
                    residual: p.residual,
                }
            })
            .collect();
        Self {
            example: example.to_string(),
            lambda: set.lambda,
            parameters,
            desk_defaults,
            points_found: set.points.len(),
            orbits_found: set.orbit_count(),
            bound: set.bound.value,
            bound_citation: set.bound.citation.clone(),
            verdict: set.verdict,
            orbits,
            assumptions: Assumptions { ops_assumed: set.bound.ops_assumed, ..assumptions },
            diagnostics: set.diagnostics.clone(),
            dynamics: None,
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "example: {}", self.example);
        let _ = writeln!(s, "lambda: {}", self.lambda);
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "  {k} = {v}");
        }
        if !self.desk_defaults.is_empty() {
            let _ = writeln!(s, "desk-scale defaults used for: {}", self.desk_defaults.join(", "));
        }
        let _ = writeln!(s, "points found: {}", self.points_found);
        let _ = writeln!(s, "orbits found: {} (bound {})", self.orbits_found, self.bound);
        let _ = writeln!(s, "bound: {}", self.bound_citation);
        let _ = writeln!(s, "verdict: {}", self.verdict);
        for (i, o) in self.orbits.iter().enumerate() {
            let sig = o.signature;
            let _ = writeln!(
                s,
                "orbit {i}: {} point(s), {}, signature (neg {}, zero {}, pos {}), representative {:?}",
                o.size, o.stability, sig.negative, sig.zero, sig.positive, o.representative
            );
        }
        let a = &self.assumptions;
        let _ = writeln!(s, "OPS condition assumed: {}", a.ops_assumed);
        let flag = |b: Option<bool>| b.map_or("n/a".to_string(), |b| b.to_string());
        let _ = writeln!(s, "condition (R): {}", flag(a.condition_r));
        let _ = writeln!(s, "G_mu in H_alpha: {}", flag(a.stabilizer_in_subgroup));
        if let Some(d) = &self.dynamics {
            let h = &d.heteroclinic;
            let _ = writeln!(s, "heteroclinic connections: {} ({})", h.connections, h.note);
            let _ = writeln!(s, "trajectory drift: energy {:e}, casimir {:e}", d.energy_drift, d.casimir_drift);
        }
        for d in &self.diagnostics {
            let _ = writeln!(s, "note: {d}");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub subalgebra: String,
    pub mu: Vec<f64>,
    pub xi: Vec<f64>,
    /// `i*(mu)` in the dual of the subalgebra.
    pub restricted_momentum: Vec<f64>,
    pub xi_in_subalgebra: bool,
    pub holds: bool,
    pub stabilizer_dim: usize,
    pub centralizer_dim: usize,
    pub witness: Option<Vec<f64>>,
}

impl RegularityReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "subalgebra: {}", self.subalgebra);
        let _ = writeln!(s, "mu = {:?}", self.mu);
        let _ = writeln!(s, "xi = {:?} (in subalgebra: {})", self.xi, self.xi_in_subalgebra);
        let _ = writeln!(s, "i*(mu) = {:?}", self.restricted_momentum);
        let _ = writeln!(s, "dim g_mu = {}, dim g_xi = {}", self.stabilizer_dim, self.centralizer_dim);
        let _ = writeln!(s, "condition (R) {}", if self.holds { "holds" } else { "fails" });
        if let Some(w) = &self.witness {
            let _ = writeln!(s, "witness in g_mu outside g_xi: {w:?}");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub status: String,
    pub points: Option<usize>,
    pub orbits: Option<usize>,
    pub bound: Option<u32>,
    pub verdict: Option<Verdict>,
    pub count_changed: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub example: String,
    pub parameters: Parameters,
    pub desk_defaults: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub predicted_orbits: Option<usize>,
    pub persists_up_to: Option<f64>,
    pub first_change: Option<f64>,
}

impl SweepReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "sweep over lambda for {}", self.example);
        if !self.desk_defaults.is_empty() {
            let _ = writeln!(s, "desk-scale defaults used for: {}", self.desk_defaults.join(", "));
        }
        for r in &self.rows {
            let n = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
            let _ = writeln!(
                s,
                "lambda {}: {} points {} orbits {} bound {} verdict {}{}",
                r.lambda,
                r.status,
                n(r.points),
                n(r.orbits),
                r.bound.map_or("-".to_string(), |b| b.to_string()),
                r.verdict.map_or("-".to_string(), |v| v.to_string()),
                r.note.as_ref().map_or(String::new(), |n| format!(" ({n})")),
            );
        }
        let _ = writeln!(s, "predicted orbits: {:?}", self.predicted_orbits);
        let _ = writeln!(s, "persists up to: {:?}", self.persists_up_to);
        let _ = writeln!(s, "first change: {:?}", self.first_change);
        s
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn coordinate_names(space: SpaceKind) -> &'static [&'static str] {
    match space {
        SpaceKind::Cylinder => &["theta", "z"],
        SpaceKind::SE2Dual => &["x", "alpha1", "alpha2"],
        SpaceKind::TStarSphere => &["x1", "x2", "x3", "y1", "y2", "y3"],
    }
}

/// One row per critical point: index, orbit, coordinates, velocity (for
/// relative equilibria), residual, signature and stability.
pub fn write_points_csv(path: &Path, comment: &str, set: &CriticalSet) -> Result<()> {
    use std::io::Write as _;
    let Some(first) = set.points.first() else {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "# {comment}")?;
        return Ok(());
    };
    let space = first.point.kind();
    let with_velocity = first.velocity.is_some();
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "# {comment}")?;
    let mut w = csv::Writer::from_writer(file);
    let mut header: Vec<String> = vec!["index".into(), "orbit".into()];
    header.extend(coordinate_names(space).iter().map(|s| s.to_string()));
    if with_velocity {
        header.push("velocity".into());
    }
    header.extend(["residual", "negative", "zero", "positive", "stability"].map(String::from));
    w.write_record(&header)?;
    let mut orbit_of = vec![0; set.points.len()];
    for (k, cluster) in set.clustering.clusters.iter().enumerate() {
        for &i in cluster {
            orbit_of[i] = k;
        }
    }
    for (i, p) in set.points.iter().enumerate() {
        let mut row = vec![i.to_string(), orbit_of[i].to_string()];
        row.extend(point_coords(&p.point).iter().map(num));
        if let Some(v) = &p.velocity {
            row.push(v.xi().coords().iter().map(num).collect::<Vec<_>>().join(" "));
        }
        row.push(num(&p.residual));
        row.extend([p.signature.negative, p.signature.zero, p.signature.positive].map(|v| v.to_string()));
        row.push(p.stability.clone());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip form, with an exponent for very small or large values.
fn num(v: &f64) -> String {
    format!("{v:?}")
}

fn point_coords(p: &PhasePoint) -> Vec<f64> {
    p.coords().iter().copied().collect()
}

pub fn write_sweep_csv(path: &Path, comment: &str, report: &SweepReport) -> Result<()> {
    use std::io::Write as _;
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "# {comment}")?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["lambda", "status", "points", "orbits", "bound", "verdict", "count_changed"])?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in &report.rows {
        w.write_record([
            num(&r.lambda),
            r.status.clone(),
            opt(r.points.map(|v| v.to_string())),
            opt(r.orbits.map(|v| v.to_string())),
            opt(r.bound.map(|v| v.to_string())),
            opt(r.verdict.map(|v| v.to_string())),
            r.count_changed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
