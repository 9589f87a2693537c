//! Warm-started sweeps over the perturbation parameter.

use crate::error::{Error, Result};

use super::{solve, CriticalSet, Mode, SolveRequest};

#[derive(Debug, Clone, PartialEq)]
pub enum NodeOutcome {
    Solved(CriticalSet),
    /// Node intentionally not solved, e.g. the critical continuum at 0.
    Skipped(String),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationNode {
    pub lambda: f64,
    pub outcome: NodeOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationResult {
    pub nodes: Vec<ContinuationNode>,
    /// Orbit count at the first solved node.
    pub predicted_orbits: Option<usize>,
    /// Largest grid value up to which every solved node has the predicted
    /// orbit count.
    pub persists_up_to: Option<f64>,
    /// First grid value at which the orbit count differs from the
    /// prediction.
    pub first_change: Option<f64>,
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("parameter grid is empty".into()));
    }
    if grid.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::InvalidParameter("parameter grid values must be finite and >= 0".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("parameter grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Solves `template` at every grid value, seeding each node with the
/// orbit representatives of the previous one.
pub fn continuation(template: &SolveRequest, grid: &[f64]) -> Result<ContinuationResult> {
    validate_grid(grid)?;
    let mut nodes = Vec::with_capacity(grid.len());
    let mut warm = Vec::new();
    for &lambda in grid {
        let req = SolveRequest { lambda, extra_seeds: warm.clone(), ..template.clone() };
        let outcome = match solve(&req) {
            Ok(set) => {
                warm = set.representatives().map(|p| p.point).collect();
                NodeOutcome::Solved(set)
            }
            Err(Error::ContinuumAtZero) if template.mode == Mode::Equilibria => {
                NodeOutcome::Skipped("lambda = 0: the unperturbed critical set is a continuum".into())
            }
            Err(e) => NodeOutcome::Failed(e.to_string()),
        };
        nodes.push(ContinuationNode { lambda, outcome });
    }
    let mut predicted = None;
    let mut persists_up_to = None;
    let mut first_change = None;
    for node in &nodes {
        let count = match &node.outcome {
            NodeOutcome::Solved(set) => set.orbit_count(),
            NodeOutcome::Skipped(_) => continue,
            NodeOutcome::Failed(_) => {
                if predicted.is_some() && first_change.is_none() {
                    first_change = Some(node.lambda);
                }
                continue;
            }
        };
        match predicted {
            None => {
                predicted = Some(count);
                persists_up_to = Some(node.lambda);
            }
            Some(p) if first_change.is_none() && p == count => persists_up_to = Some(node.lambda),
            Some(p) if first_change.is_none() && p != count => first_change = Some(node.lambda),
            _ => {}
        }
    }
    Ok(ContinuationResult { nodes, predicted_orbits: predicted, persists_up_to, first_change })
}
