use thiserror::Error;

/// Errors raised by the simulation and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A parameter lies outside the domain where the quantity is finite.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative or adaptive routine did not reach its tolerance.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
