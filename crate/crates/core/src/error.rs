use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("empty input")]
    EmptyInput,

    #[error("timestamp {t} at point {index} does not increase past {previous}")]
    NonMonotoneTimestamp { index: usize, previous: f64, t: f64 },

    #[error("point {index} has a non-finite coordinate or timestamp")]
    NonFinite { index: usize },

    #[error("input of {len} points exceeds the limit of {max}")]
    TooLarge { len: usize, max: usize },

    #[error("{path}: line {line}: {message}")]
    Csv { path: PathBuf, line: u64, message: String },

    #[error("{path}: trajectory `{traj_id}` row {line}: timestamp {t} does not increase past {previous}")]
    TrajectoryOrder {
        path: PathBuf,
        traj_id: String,
        line: u64,
        previous: f64,
        t: f64,
    },

    #[error("unknown algorithm `{0}` (expected dp, opw, fbqs, operb or operb-a)")]
    UnknownAlgorithm(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::UnknownAlgorithm(_) => 1,
            Error::EmptyInput
            | Error::NonMonotoneTimestamp { .. }
            | Error::NonFinite { .. }
            | Error::TooLarge { .. }
            | Error::Csv { .. }
            | Error::TrajectoryOrder { .. }
            | Error::Io { .. }
            | Error::Json(_) => 2,
            Error::Precondition(_) | Error::Invariant(_) => 3,
        }
    }
}
