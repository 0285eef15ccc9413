use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible operands (family or truncation mismatch) or an
    /// insufficient-headroom request.
    #[error("configuration error: {0}")]
    Config(String),

    /// A time index beyond the internal index cap.
    #[error("time index {index} exceeds internal cap {cap}")]
    IndexRange { index: u32, cap: u32 },

    /// A precondition on the mathematical domain was violated
    /// (e.g. exp of a series with a constant term).
    #[error("domain error: {0}")]
    Domain(String),

    /// A malformed record in the persistent correlator cache.
    #[error("cache error at line {line}: {msg}")]
    Cache { line: usize, msg: String },

    /// An internal invariant failed; indicates a bug in a recursion.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
