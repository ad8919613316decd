use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index out of range: {index} (dimension {dim})")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("combinatorial blowup: dimension {d} exceeds the enumeration cap {cap}")]
    CombinatorialBlowup { d: usize, cap: usize },

    #[error("dimension {d} exceeds the dense cap {cap}; {hint}")]
    DimensionCap {
        d: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("point is not in the polytope")]
    NotInPolytope,

    #[error("no block construction exists for d={d}, p={p}")]
    NoBlockConstruction { d: usize, p: String },

    #[error("grid too large: {len} points exceeds the budget of {budget}")]
    GridOverflow { len: usize, budget: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
