use thiserror::Error;

/// Errors raised by the simulator and the assignment solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shadowing covariance is not positive definite: {0}")]
    Shadowing(String),

    #[error("assignment row {row} is not one-hot: {reason}")]
    Assignment { row: usize, reason: String },

    #[error("search space of {size} assignments exceeds the enumeration cap of {cap}; use local search")]
    EnumerationCap { size: u128, cap: u64 },

    #[error("unknown packet id {0}")]
    UnknownPacket(usize),

    #[error("decode table contains no transmissions")]
    EmptyTable,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("realization {realization}: {source}")]
    Realization {
        realization: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
