use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A distribution or fleet was built with parameters outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An experiment configuration failed validation. `field` names the key.
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    /// Exhaustive search refused because the action set is too large.
    #[error("brute-force search over {size} allocations exceeds the limit of {limit}")]
    SearchTooLarge { size: u128, limit: u128 },

    /// An internal invariant did not hold; this indicates a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("run `{run}` never reached suboptimality {threshold:e}")]
    ThresholdNotReached { run: String, threshold: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
