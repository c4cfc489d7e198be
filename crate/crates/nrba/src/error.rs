use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NrbaError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: row {row}: {source}")]
    Data {
        path: PathBuf,
        row: usize,
        #[source]
        source: nrba_core::Error,
    },
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] nrba_core::Error),
    #[error("step {step} ({name}) failed: {source}")]
    Step {
        step: u8,
        name: &'static str,
        #[source]
        source: Box<NrbaError>,
    },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = NrbaError> = std::result::Result<T, E>;

impl NrbaError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        NrbaError::Io {
            path: path.into(),
            source,
        }
    }
}
