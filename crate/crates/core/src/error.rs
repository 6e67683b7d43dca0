use thiserror::Error;

/// Errors produced by the geometry kernel and the operator layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("singular linear map (det = 0)")]
    SingularMap,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("generator failed to produce a valid sample after {0} retries")]
    GeneratorExhausted(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
