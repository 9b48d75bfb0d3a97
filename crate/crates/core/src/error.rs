use thiserror::Error;

/// Errors reported by the library.
///
/// Every variant carries a human-readable description that names the
/// offending indices or values, so callers can surface it directly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes of two objects do not agree (block structure, lengths, spaces).
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// An index is outside its valid range.
    #[error("index out of range: {0}")]
    Index(String),
    /// An operation was called on input that violates its precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A distance matrix violates a metric axiom.
    #[error("metric axiom violated: {0}")]
    Metric(String),
    /// A state (on the algebra or on the function space) is invalid.
    #[error("invalid state: {0}")]
    State(String),
    /// The exhaustive search would be too large.
    #[error("{0}")]
    TooLarge(String),
    /// The linear-program solver failed numerically.
    #[error("linear program: {0}")]
    Lp(String),
    /// An internal invariant that should hold by construction did not.
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
