use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A textual or JSON input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// A finite metric failed one of its structural invariants.
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    /// A comparison could not be decided within the precision budget.
    #[error("unresolved: {0}")]
    Unresolved(String),
    /// The requested computation exceeds a hard resource guard.
    #[error("resource limit: {0}")]
    Resource(String),
    /// The input is too small for the requested construction.
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
