use thiserror::Error;

/// Errors raised by the estimation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Cholesky factorization met a non-positive pivot.
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    /// A loss or score needed the inverse of an estimate that has none.
    #[error("singular estimate")]
    SingularEstimate,

    #[error("tuning grid is empty")]
    EmptyGrid,

    #[error("estimate for order {index} failed: {source}")]
    OrderFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
