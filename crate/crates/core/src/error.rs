use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Point outside the region where the model is defined (origin of a
    /// Coulomb-type system, metric singularity of a two-parameter family).
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
