use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("register labeling error: {0}")]
    Labeling(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Domain(String),

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("problem is infeasible as built: {0}")]
    InfeasibleAtBuild(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
