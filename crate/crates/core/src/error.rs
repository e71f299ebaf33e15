use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty range: {0}")]
    EmptyRange(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("prime {p} is excluded: {reason}")]
    ExcludedPrime { p: u64, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    /// A theorem-backed inequality failed. Always a bug in this crate.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
