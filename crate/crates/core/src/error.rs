use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a degree-{degree} curve needs at least {} control points, got {n}", degree + 1)]
    TooFewControlPoints { n: usize, degree: usize },

    #[error("degree must be between 1 and {max}, got {degree}")]
    UnsupportedDegree { degree: usize, max: usize },

    #[error("operation needs a curve of degree >= {needed}, got {degree}")]
    DegreeTooLow { needed: usize, degree: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("search direction is not a descent direction (g'p = {0:e})")]
    NotDescentDirection(f64),

    #[error("Cholesky factorization failed at row {row} (pivot {pivot:e})")]
    Factorization { row: usize, pivot: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
