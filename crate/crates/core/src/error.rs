use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("variant mismatch: {0}")]
    VariantMismatch(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("unbound symbolic parameter x{0}")]
    UnboundParameter(u32),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("search cap {cap} exceeded: {what}")]
    CapExceeded { what: String, cap: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("trivial system has no reduction")]
    TrivialReduction,
    #[error("non-integer value {0} where an integer was required")]
    NonInteger(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
