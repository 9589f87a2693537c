//! Partition of critical points into `H`-orbits.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use crate::error::Result;
use crate::lie::{GroupElement, GroupId};
use crate::models::{self, HamiltonianFamily, PhasePoint};

/// Two points are in the same orbit when some `g in H` maps one within this
/// distance of the other.
pub const CLUSTER_TOL: f64 = 1e-6;

const ANGLE_SCAN: usize = 72;
const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    /// Clusters as sorted index lists, ordered by representative.
    pub clusters: Vec<Vec<usize>>,
    /// Index of each cluster's representative: the member with the
    /// lexicographically smallest coordinates.
    pub representatives: Vec<usize>,
}

pub fn lex_cmp(a: &PhasePoint, b: &PhasePoint) -> Ordering {
    let (ca, cb) = (a.coords(), b.coords());
    ca.iter()
        .zip(cb.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > GOLDEN_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    f(0.5 * (a + b))
}

/// `min_{g in H} |g . p - q|`.
pub fn orbit_distance(h: GroupId, p: &PhasePoint, q: &PhasePoint) -> Result<f64> {
    if let Some(elements) = h.finite_elements() {
        let mut best = f64::INFINITY;
        for g in &elements {
            best = best.min(models::act(g, p)?.distance(q));
        }
        return Ok(best);
    }
    match h {
        GroupId::SO2 | GroupId::O2 => {
            let rotated = |phi: f64| {
                GroupElement::rotation(h, phi)
                    .and_then(|g| models::act(&g, p))
                    .map(|gp| gp.distance(q))
                    .unwrap_or(f64::INFINITY)
            };
            let step = TAU / ANGLE_SCAN as f64;
            let samples: Vec<f64> = (0..ANGLE_SCAN).map(|i| rotated(i as f64 * step)).collect();
            let (imin, _) = samples
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("non-empty scan");
            let centre = imin as f64 * step;
            let mut best = golden_min(&rotated, centre - step, centre + step);
            if h == GroupId::O2 {
                let reflected = models::act(&GroupElement::reflection(0.0), p)?;
                best = best.min(orbit_distance(GroupId::SO2, &reflected, q)?);
            }
            Ok(best.min(samples[imin]))
        }
        _ => Err(crate::error::Error::UnsupportedGroup { op: "orbit clustering", group: h }),
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

pub fn cluster_into_h_orbits(points: &[PhasePoint], family: &HamiltonianFamily) -> Result<Clustering> {
    let h = family.symmetry().h;
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if find(&mut parent, i) == find(&mut parent, j) {
                continue;
            }
            if orbit_distance(h, &points[i], &points[j])? <= CLUSTER_TOL {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(k) => groups[k].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    let mut with_rep: Vec<(usize, Vec<usize>)> = groups
        .into_iter()
        .map(|g| {
            let rep = *g.iter().min_by(|a, b| lex_cmp(&points[**a], &points[**b])).expect("non-empty");
            (rep, g)
        })
        .collect();
    with_rep.sort_by(|a, b| lex_cmp(&points[a.0], &points[b.0]));
    Ok(Clustering {
        representatives: with_rep.iter().map(|(r, _)| *r).collect(),
        clusters: with_rep.into_iter().map(|(_, g)| g).collect(),
    })
}
