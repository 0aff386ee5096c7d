use std::path::PathBuf;

use thiserror::Error;

use crate::derivatives::DerivativeSpec;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("{path}: row {row}, column {column}: {message}")]
    Parse {
        path: String,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported derivative {0}")]
    UnsupportedDerivative(DerivativeSpec),

    #[error("derivative {0} is not available in the table")]
    MissingDerivative(DerivativeSpec),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("enumeration budget exceeded: {count} equations (limit {limit})")]
    BudgetExceeded { count: u128, limit: u128 },

    #[error("unstable time step: dt = {dt:e} exceeds bound {bound:e}")]
    Unstable { dt: f64, bound: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from user-supplied configuration rather than a
    /// runtime failure. The CLI maps this onto its exit code.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::InvalidGrid(_) | Error::BudgetExceeded { .. } | Error::UnsupportedDerivative(_)
        )
    }
}
