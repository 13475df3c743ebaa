use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is not standardized; call standardize() first")]
    Unstandardized,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive definite (pivot {pivot} is {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("column {0} is constant and cannot be standardized")]
    ConstantColumn(usize),

    #[error("non-finite value in {0}")]
    NonFiniteInput(&'static str),

    #[error("slice sampler started from a point with non-finite log density ({0})")]
    InvalidSliceStart(f64),

    #[error("sampler produced non-finite `{parameter}` at iteration {iteration}")]
    NonFiniteState {
        iteration: usize,
        parameter: &'static str,
    },

    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures raised while a chain was running.
    pub fn is_sampler_failure(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteState { .. }
                | Error::InvalidSliceStart(_)
                | Error::NotPositiveDefinite { .. }
        )
    }
}
