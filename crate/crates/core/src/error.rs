use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("point outside the evaluation locus: {0}")]
    OutsideLocus(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
