use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid set description: {0}")]
    InvalidSet(String),

    #[error("set carries no geometry, but the operation requires boxes")]
    MissingGeometry,

    #[error("geometry violation between nodes {a} and {b}: {detail}")]
    GeometryViolation { a: usize, b: usize, detail: String },

    #[error("repulsion schedule must be positive and strictly increasing (violated at index {0})")]
    InvalidSchedule(usize),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("node {0} is not a leaf")]
    NotALeaf(usize),

    #[error("nodes {0} and {1} are not distinct siblings")]
    NotSiblings(usize, usize),

    #[error("node {0} carries zero mass; mass exchange needs positive mass on both sides")]
    ZeroMass(usize),

    #[error("set is not socialist: {0}")]
    NotSocialist(String),

    #[error("even-distribution check failed: {0}")]
    NotEvenlyDistributed(String),

    #[error(
        "points {i} and {j} are {dist:.6e} apart, closer than the required separation {required:.6e}"
    )]
    SeparationViolation {
        i: usize,
        j: usize,
        dist: f64,
        required: f64,
    },

    #[error("kernel matrix is not positive definite: factorization failed")]
    NotPositiveDefinite,

    #[error("linear solve stalled: relative residual {residual:.3e} after {iterations} iterations")]
    SolveStalled { iterations: usize, residual: f64 },

    #[error(
        "minimization did not reach the target optimality residual: {residual:.3e} after {iterations} iterations"
    )]
    MinimizationStalled {
        iterations: usize,
        residual: f64,
        /// Best iterate found before giving up.
        best: Box<crate::minimizer::MinimizationResult>,
    },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
