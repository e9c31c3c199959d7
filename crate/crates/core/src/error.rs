use std::path::PathBuf;

use crate::integrate::BlowUp;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("size mismatch: expected {expected} samples, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("non-finite sample in component {component} at index {index}")]
    NonFiniteSample { component: usize, index: usize },

    #[error("multiplier symbol is not finite at wavevector {0:?}")]
    NonFiniteSymbol(Vec<f64>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("blow-up detected at t = {:.6}: {}", .0.t, .0.reason)]
    BlowUp(Box<BlowUp>),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("snapshot {path}: {kind}")]
    Snapshot { path: PathBuf, kind: crate::io::snapshot::SnapshotError },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
