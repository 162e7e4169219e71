use thiserror::Error;

/// Profile coordinates as (player-1 strategy index, player-2 strategy index).
pub type ProfileIndex = (usize, usize);

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("replication failed on day {day} (seed {seed}): {message}")]
    Replication { day: usize, seed: u64, message: String },

    #[error("incomplete game: missing payoffs for profiles {missing:?}")]
    IncompleteGame { missing: Vec<ProfileIndex> },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("design error: {0}")]
    Design(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by user input rather than by a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_) | Error::Config { .. } | Error::Parse(_) | Error::Design(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
