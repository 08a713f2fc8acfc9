use thiserror::Error;

/// Errors raised by the toolkit. Numeric payloads are reported as `f64`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point has non-finite coordinate {0}")]
    NonFiniteCoordinate(f64),

    #[error("torus coordinate {0} outside [0, 1)")]
    TorusCoordinate(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("index ({0}, {1}) out of range for {2}x{3} cost")]
    IndexOutOfRange(usize, usize, usize, usize),

    #[error("cost specification needs {0}")]
    UnsupportedArgument(&'static str),

    #[error("invalid cost value {0}")]
    InvalidCost(f64),

    #[error("invalid weight {0}")]
    InvalidWeight(f64),

    #[error("weights sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("measure has no atoms")]
    EmptyMeasure,

    #[error("weights and points have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("p-norm exponent must be >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("cost matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),

    #[error("infeasible: no coupling avoids the forbidden (infinite) entries")]
    Infeasible,

    #[error("instance size {size} exceeds limit {limit}")]
    SizeExceeded { size: usize, limit: usize },

    #[error("marginal totals differ by {0}")]
    Unbalanced(f64),

    #[error("support pair ({0}, {1}) has infinite cost")]
    InfiniteOnSupport(usize, usize),

    /// `cycle` lists support-pair indices; `improvement` is the cost saved by the cyclic shift.
    #[error("support is not c-cyclically monotone: cycle {cycle:?} improves cost by {improvement}")]
    NotMonotone { cycle: Vec<usize>, improvement: f64 },

    #[error("every potential value is -inf")]
    AllNegativeInfinity,

    #[error("no finite candidate for target {0}; the c-transform would be +inf")]
    Degenerate(usize),

    #[error("root index {0} out of range for support of size {1}")]
    RootOutOfRange(usize, usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
