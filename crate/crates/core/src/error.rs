use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node count must be even and at least {min}, got {got}")]
    NodeCount { got: usize, min: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,

    #[error("degenerate curve: nodes {0} and {1} coincide")]
    DegenerateCurve(usize, usize),

    #[error("curve diameter {0} is not below 1; single layer positivity is not guaranteed")]
    DiameterTooLarge(f64),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator kind mismatch: expected {expected}")]
    KindMismatch { expected: &'static str },

    #[error("Cholesky factorization of the single layer matrix failed")]
    CholeskyFailed,

    #[error("grid too narrow: support half-width {support} needs half-width at least {required}, grid has {half_width}")]
    GridTooNarrow {
        support: f64,
        required: f64,
        half_width: f64,
    },

    #[error("curve does not match quasimode: {0}")]
    CurveMismatch(String),

    #[error("no density witness within epsilon {epsilon} for x = {x}")]
    NoWitness { x: f64, epsilon: f64 },

    #[error("sweep input rejected: {0}")]
    InvalidSweep(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
