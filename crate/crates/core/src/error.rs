use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum LinqError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("receiver placement for link {link} failed after {attempts} attempts")]
    PlacementFailed { link: usize, attempts: usize },

    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),

    #[error("problem size {n} exceeds the cap of {cap} for {what}")]
    SizeCap {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),

    #[error("episode already finished")]
    EpisodeDone,

    #[error("unknown {kind} `{value}`")]
    Unknown { kind: &'static str, value: String },

    #[error("{0}")]
    Missing(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(String),
}

impl LinqError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LinqError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = LinqError> = std::result::Result<T, E>;
