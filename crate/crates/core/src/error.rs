use thiserror::Error;

/// Errors raised by the deconvolution toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpedError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A structural precondition between arguments does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Input data or a computed curve contains non-finite values.
    #[error("data error: {0}")]
    Data(String),
    /// A simulation replicate failed.
    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: u64,
        #[source]
        source: Box<SpedError>,
    },
}

impl SpedError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        SpedError::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        SpedError::Precondition(msg.into())
    }
}

pub type Result<T, E = SpedError> = std::result::Result<T, E>;
