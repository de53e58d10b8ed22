use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("training diverged at epoch {epoch}, batch {batch}: {what}")]
    TrainingDiverged {
        epoch: usize,
        batch: usize,
        what: String,
    },

    #[error(
        "langevin sampling diverged at scale index {t}, inner step {n}; try a smaller beta0"
    )]
    SamplingDiverged { t: usize, n: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at {path}: {what}")]
    Parse { path: String, what: String },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
