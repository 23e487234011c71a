//! Error type shared by the whole crate.

/// Failure classes, kept coarse so callers (CLI, FFI) can map them to
/// exit codes and C error codes without string matching.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller broke a documented precondition (empty sample, non-finite
    /// value, dimension mismatch, out-of-range parameter).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// External data could not be understood (CSV shape, model file schema).
    #[error("data error: {0}")]
    Data(String),

    /// A computation failed numerically (singular matrix, non-convergence).
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
