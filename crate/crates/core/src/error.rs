use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scenario field failed validation or could not be parsed.
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// Input series or files that cannot be processed.
    #[error("data error: {0}")]
    Data(String),

    /// A statistic is undefined for the given series.
    #[error("statistics error: {0}")]
    Stats(String),

    /// A model invariant broke during a run. Aborts the run.
    #[error("invariant violated at round {round}: {message}")]
    Invariant { round: u64, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn invariant(round: u64, message: impl Into<String>) -> Self {
        Error::Invariant {
            round,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stamps the round on an invariant violation raised by a round-agnostic helper.
    pub fn at_round(self, round: u64) -> Self {
        match self {
            Error::Invariant { message, .. } => Error::Invariant { round, message },
            other => other,
        }
    }

    /// Process exit code for the error category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::Data(_) => 3,
            Error::Stats(_) => 4,
            Error::Invariant { .. } => 5,
            Error::Io { .. } => 6,
        }
    }
}
