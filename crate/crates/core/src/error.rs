use thiserror::Error;

/// Errors raised by the library. Variants are grouped so front ends can map
/// them onto distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input: unparseable literal, bad JSON, wrong shape.
    #[error("parse error: {0}")]
    Parse(String),

    /// Well-formed input that violates an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The request is too large for the chosen method.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
