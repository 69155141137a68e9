use std::path::PathBuf;

use crate::model::Checkpoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Bytes that do not follow the expected container layout.
    #[error("format error: {0}")]
    Format(String),

    /// Two inputs that must agree (image/label counts, layouts) do not.
    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// An image without any lit pixel; no photon can pass the filter.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("usage error: {0}")]
    Usage(String),

    /// Training produced a non-finite loss. The checkpoint holds the weights
    /// from before the failing step.
    #[error("training diverged at step {step}: loss = {loss}")]
    Diverged {
        step: usize,
        loss: f64,
        checkpoint: Box<Checkpoint>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
