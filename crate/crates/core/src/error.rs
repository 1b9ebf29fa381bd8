use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("input outside the problem box: {0}")]
    OutOfBounds(String),

    #[error("bit length {len} is not divisible by group size {group}")]
    IndivisibleLength { len: usize, group: usize },

    #[error("root2path requires an odd bit length, got {0}")]
    EvenPathLength(usize),

    #[error("parse error in {section}: {message}")]
    Parse { section: String, message: String },

    #[error("instance too large for exhaustive search: n = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("illegal start: off for {tau_off} h but minimum down time is {gamma_down} h")]
    IllegalStart { tau_off: u32, gamma_down: u32 },

    #[error("dispatch infeasible: demand window [{low}, {high}] MW outside committed range [{min}, {max}] MW")]
    DispatchInfeasible { low: f64, high: f64, min: f64, max: f64 },

    #[error("instance cannot be repaired: {0}")]
    Unrepairable(String),

    #[error("empty sample")]
    EmptySample,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
