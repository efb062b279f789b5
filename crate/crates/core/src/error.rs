use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid (m, k) or other user parameters.
    #[error("invalid parameters: {0}")]
    Params(String),

    /// An operation was applied outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A closed form disagreed with its defining expression. These indicate a
    /// bug (or a false identity) rather than bad input.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
