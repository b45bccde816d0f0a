use thiserror::Error;

/// Errors raised by the algebra, the builders and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("resolvent diverges: |scalar part| = {0} is not below 1")]
    ResolventDivergence(f64),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("kernel evaluation failed at lag {lag}: {reason}")]
    KernelDomain { lag: f64, reason: String },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
