use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("construction failed at block {block}: {reason}")]
    Construction { block: usize, reason: String },
    #[error("division error: {0}")]
    Division(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("degree cap exceeded: {0}")]
    DegreeCap(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
