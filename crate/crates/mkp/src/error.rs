use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A solver refused to run because the estimated work or memory
    /// exceeds the configured guard.
    #[error("{what} guard exceeded: estimated {estimate}, limit {limit}")]
    GuardExceeded {
        what: &'static str,
        estimate: u128,
        limit: u128,
    },

    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
