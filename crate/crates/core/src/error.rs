use thiserror::Error;

/// Errors raised by the samplers and models.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Shapes of the arguments do not agree, or a rank exceeds a dimension.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// A numeric argument is out of its domain (non-finite, asymmetric, non-positive).
    #[error("invalid input: {0}")]
    Input(String),
    /// A manifold constraint (unit norm, orthonormal columns) is violated.
    #[error("constraint violated: {0}")]
    Constraint(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
