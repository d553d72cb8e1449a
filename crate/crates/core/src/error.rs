use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which resource ran out while solving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetKind {
    Time,
    Memory,
    Expansions,
}

impl std::fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BudgetKind::Time => f.write_str("time"),
            BudgetKind::Memory => f.write_str("memory"),
            BudgetKind::Expansions => f.write_str("expansion"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid vertices have different arity ({left} vs {right})")]
    ArityMismatch { left: usize, right: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid segment {start}..{end} on sequence {seq} of length {len}")]
    InvalidSegment {
        seq: usize,
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("oracles take a non-empty set of non-empty segments")]
    EmptySegmentSet,

    #[error("criterion `{criterion}` must be {required}")]
    FlagViolation {
        criterion: String,
        required: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coincident points")]
    CoincidentPoints,

    #[error("timestamps must be strictly increasing ({from} -> {to})")]
    NonIncreasingTime { from: f64, to: f64 },

    #[error("no flow diagram exists: {0}")]
    Infeasible(String),

    #[error("beam search dead-ended at step {step} although every state is coverable")]
    BeamDeadEnd { step: usize },

    #[error("prefix graph has {vertices} vertices, above the cap of {cap}")]
    CapExceeded { vertices: u128, cap: u128 },

    #[error("{0} budget exceeded")]
    Budget(BudgetKind),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
