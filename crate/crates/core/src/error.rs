use thiserror::Error;

/// Failure classes shared by every stage of the pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {position}: {message} (token `{token}`)")]
    Parse {
        position: usize,
        token: String,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("resource cap exceeded in {stage}: {detail}")]
    Resource { stage: String, detail: String },

    #[error("construction integrity violated: {0}")]
    Integrity(String),

    #[error("certification failed at check `{check}`: {witness}")]
    Certification { check: String, witness: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn resource(stage: &str, detail: impl Into<String>) -> Self {
        Error::Resource {
            stage: stage.to_string(),
            detail: detail.into(),
        }
    }
}
