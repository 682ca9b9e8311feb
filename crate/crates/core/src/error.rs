use thiserror::Error;

/// Errors raised by the library and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("interval mismatch: ({0}, {1}) vs ({2}, {3})")]
    IntervalMismatch(f64, f64, f64, f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("atom order {order} exceeds the configured maximum {k_max}")]
    OrderOverflow { order: usize, k_max: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("syntax error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("type error: {0}")]
    Type(String),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
