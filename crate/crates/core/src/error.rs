use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix has no nonzero row (Frobenius norm is zero)")]
    AllRowsZero,

    #[error("sketch {index} has positive weight but selects only zero rows")]
    ZeroSketchedMatrix { index: usize },

    #[error("invalid sketch distribution: {0}")]
    InvalidDistribution(String),

    #[error("line search direction is zero")]
    ZeroDirection,

    #[error("line search bracket exceeded 2^60 without a sign change")]
    Unbounded,

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error in {path} line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("unsupported Matrix Market field or symmetry: {0}")]
    UnsupportedField(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
