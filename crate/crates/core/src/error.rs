use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("arrangement holds no sand")]
    EmptyArrangement,

    #[error("unsupported game kind: {0}")]
    UnsupportedKind(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("stream error: {0}")]
    Stream(String),

    #[error("search inconclusive: {0}")]
    Inconclusive(String),

    #[error("incomplete coloring: vertex {0} has no color")]
    IncompleteColoring(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
