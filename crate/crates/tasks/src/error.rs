use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input for {task}: {input:?} ({reason})")]
    Malformed {
        task: String,
        input: String,
        reason: String,
    },
    #[error("invalid argument: {0}")]
    InvalidInput(String),
    #[error("could not draw enough distinct items: {0}")]
    Exhausted(String),
    #[error("primitives not covered by the pool: {}", .0.join(", "))]
    Uncovered(Vec<String>),
    #[error("parse error at token {position}: {reason}")]
    Parse { position: usize, reason: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn malformed(task: impl ToString, input: &str, reason: impl ToString) -> Error {
    Error::Malformed {
        task: task.to_string(),
        input: input.to_string(),
        reason: reason.to_string(),
    }
}
