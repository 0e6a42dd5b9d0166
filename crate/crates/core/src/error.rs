use thiserror::Error;

/// Errors raised by the library. Every public fallible operation returns one of these.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A size exceeded a memory or enumeration guard.
    #[error("capacity exceeded: {what} = {value} (allowed {min}..={max})")]
    Capacity {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },
    /// A qubit, node or variable index was out of range.
    #[error("index {index} out of range for {what} of size {size}")]
    Index {
        what: &'static str,
        index: usize,
        size: usize,
    },
    /// Inputs violate a documented precondition.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// The objective handed to an optimizer produced NaN or infinity.
    #[error("objective returned non-finite value {value} after {evaluations} evaluations")]
    NonFinite { value: f64, evaluations: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
