use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),
    #[error("degenerate chart at {0}")]
    DegenerateChart(String),
    #[error("lookup error: {0}")]
    Lookup(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vector is not normal to the stratum (residual {0:.3e})")]
    NotNormal(f64),
    #[error("ill-conditioned fit (condition number {0:.3e}); try a different epsilon ladder")]
    IllConditioned(f64),
    #[error("resample quota exceeded: {rejected} of {attempted} samples rejected ({reason})")]
    ResampleQuota {
        rejected: usize,
        attempted: usize,
        reason: String,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
}
