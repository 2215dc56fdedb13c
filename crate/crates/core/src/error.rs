use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Bad arguments or malformed input data.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Inverse iteration did not reach the residual target for eigenvector `index`.
    #[error("inverse iteration failed to converge for eigenvector {index} (residual {residual:e})")]
    NoConvergence { index: usize, residual: f64 },

    /// Every entry of the projected vector was non-positive.
    #[error("projection has no positive mass; cannot clip-normalize")]
    DegenerateProjection,
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
