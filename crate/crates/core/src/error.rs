use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps [`Error::is_unsupported`] variants to exit code 2 and the
/// rest to exit code 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("ordering pattern terms must form an initial segment 0..=r of the nonnegative integers, got {0:?}")]
    OrderingAlphabet(Vec<u64>),

    #[error("empty pattern")]
    EmptyPattern,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration guard exceeded: {count} compositions > limit {limit}")]
    GuardExceeded { count: String, limit: u64 },

    #[error("unknown statistic `{0}`")]
    UnknownStatistic(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures caused by guards or unsupported combinations
    /// rather than malformed input.
    pub fn is_unsupported(&self) -> bool {
        matches!(self, Error::Unsupported(_) | Error::GuardExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
