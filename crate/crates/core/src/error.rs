use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Validation(String),

    /// The word-problem oracle cannot answer; never replaced by a guess.
    #[error("oracle undecided: {0}")]
    Undecided(String),

    #[error("query leaves the materialized region: {0}")]
    OutOfRegion(String),

    #[error("budget exceeded: {what} (attained {attained})")]
    Budget { what: String, attained: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn budget(what: impl Into<String>, attained: usize) -> Self {
        Error::Budget { what: what.into(), attained }
    }

    /// Prefixes the message with the location of the offending input.
    pub fn at(self, field: impl std::fmt::Display) -> Self {
        match self {
            Error::Parse(m) => Error::Parse(format!("{field}: {m}")),
            Error::Validation(m) => Error::Validation(format!("{field}: {m}")),
            Error::Precondition(m) => Error::Precondition(format!("{field}: {m}")),
            Error::Unsupported(m) => Error::Unsupported(format!("{field}: {m}")),
            other => Error::Validation(format!("{field}: {other}")),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
