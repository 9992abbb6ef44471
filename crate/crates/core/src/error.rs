use thiserror::Error;

/// Errors raised by the orbit-closure engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed system: {0}")]
    Dimension(String),

    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),

    #[error("point not in A^{{r,s}}: coordinate {0} is an invertible variable and must be nonzero")]
    NotInDomain(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular matrix")]
    Singular,

    /// Violation of a documented precondition of the decision procedure
    /// (zero orbit, missing conic assertion, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("system too large: {0}")]
    Oversized(String),

    #[error("resource limit exceeded: {0}")]
    ResourceAbort(String),

    /// Degree data whose evaluated formula is not a positive integer.
    #[error("inconsistent degree data: {0}")]
    InconsistentData(String),

    #[error("certificate verification failed: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
