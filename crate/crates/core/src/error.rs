use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cholesky factorization failed at pivot {pivot}")]
    Factorization { pivot: usize },

    #[error("matrix is singular or rank deficient (diagonal entry {index} of R is {value:e})")]
    Singular { index: usize, value: f64 },

    #[error("newton iteration did not converge after {iterations} iterations (gradient max-norm {gradient_norm:e})")]
    NonConvergence { iterations: usize, gradient_norm: f64 },

    #[error("latent covariance is identically zero; the objective has no density")]
    DegenerateCovariance,

    #[error("field grid has {nodes} nodes, above the dense limit of {limit}")]
    GridTooLarge { nodes: usize, limit: usize },

    #[error("pattern has too few points: {0}")]
    TooFewPoints(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
