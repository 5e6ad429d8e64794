use thiserror::Error;

pub type Result<T> = std::result::Result<T, CameoError>;

#[derive(Debug, Error)]
pub enum CameoError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A size guard or work budget was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CameoError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CameoError::Domain(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        CameoError::Resource(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        CameoError::Parse(msg.into())
    }
}
