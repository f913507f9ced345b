use thiserror::Error;

/// Errors from IO, configuration and the validation harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] bbargmin_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Invalid(String),
    #[error("trial {trial} (d = {d}, N = {n}) failed: {source}")]
    Trial {
        d: u32,
        n: u32,
        trial: u64,
        #[source]
        source: bbargmin_core::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
