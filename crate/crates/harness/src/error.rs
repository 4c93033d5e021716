use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("environment variable {0} holding the API key is not set")]
    MissingApiKey(String),
    /// Retries exhausted or a non-retryable HTTP failure.
    #[error("transport error after {attempts} attempt(s) (request {request_id}): {message}")]
    Transport {
        request_id: String,
        attempts: u32,
        message: String,
    },
    /// The endpoint answered but the body is not a completion.
    #[error("protocol error (request {request_id}): {message}")]
    Protocol { request_id: String, message: String },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Tasks(#[from] compose_tasks::Error),
    #[error(transparent)]
    Core(#[from] compose_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn file_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::File { path, source }
}
