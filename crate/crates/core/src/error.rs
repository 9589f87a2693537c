use thiserror::Error;

use crate::lie::GroupId;
use crate::reduction::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group mismatch: expected {expected}, found {found}")]
    GroupMismatch { expected: GroupId, found: GroupId },

    #[error("operation `{op}` is not supported for group {group}")]
    UnsupportedGroup { op: &'static str, group: GroupId },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("phase space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("velocity does not commute with momentum (|ad*_xi mu| = {residual:e})")]
    NonCommuting { residual: f64 },

    #[error("point is not critical (residual {residual:e})")]
    NotCritical { residual: f64 },

    #[error("degenerate seed: Hessian is singular transverse to the group orbit (min/max |eig| = {ratio:e})")]
    DegenerateSeed { ratio: f64 },

    #[error("relative equilibrium is not alpha-nondegenerate")]
    NotAlphaNondegenerate,

    #[error("momentum level set is not regular at the seed (rank {rank} < {expected})")]
    NonRegularLevelSet { rank: usize, expected: usize },

    #[error("momentum level set is empty near the seed (distance {distance:e})")]
    EmptyLevelSet { distance: f64 },

    #[error("lambda = 0: the critical set is the whole seed orbit, not isolated points")]
    ContinuumAtZero,

    #[error("not an equilibrium of the Lie-Poisson field (|X| = {residual:e})")]
    NotEquilibrium { residual: f64 },

    #[error("no category table entry for {0}")]
    NoTableEntry(String),

    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64, partial: Box<Trajectory> },

    #[error("table override: {0}")]
    Override(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
