use thiserror::Error;

/// Errors raised by the geometric and tiling layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {0} outside [0,1]")]
    CoordinateOutOfRange(String),

    #[error("empty interval ({lo}, {hi})")]
    EmptyInterval { lo: String, hi: String },

    #[error("invalid cut list: {0}")]
    InvalidCuts(String),

    #[error("operands live on different arrangements")]
    ArrangementMismatch,

    #[error("invalid rational: {0}")]
    InvalidRational(String),

    #[error("infeasible base request: {0}")]
    Infeasible(String),

    #[error("base property violated at {point}: frontiers of {indices:?} meet")]
    BaseProperty { point: String, indices: Vec<usize> },

    #[error("cover precondition violated: face {face} at {point} is uncovered")]
    Uncovered { face: String, point: String },

    #[error("base index {0} already belongs to the budget")]
    IndexCollision(usize),

    #[error("no tile with index {0}")]
    NoSuchTile(usize),

    #[error("base exhausted at level {level}: tile {tile} cannot be covered near {point}")]
    BaseExhausted { level: usize, tile: usize, point: String },

    #[error("generator count {count} exceeds the enumeration guard {limit}")]
    GuardExceeded { count: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
