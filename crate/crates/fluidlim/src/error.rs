use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A state violated a domain predicate (`x` outside `D`).
    #[error("state outside domain D: {context}")]
    OutsideDomain { context: String },

    /// A caller-supplied parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The sampler or bookkeeping produced a state inconsistent with the
    /// model's own invariants.
    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    /// Jump count safety cap exceeded, which usually signals mis-scaled rates.
    #[error("jump count exceeded max_jumps = {max_jumps} before horizon {horizon}")]
    MaxJumpsExceeded { max_jumps: usize, horizon: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),
}
