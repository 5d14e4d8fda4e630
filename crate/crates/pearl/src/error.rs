//! Error type shared across the crate.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector had the wrong length for the operation.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// An input contained NaN or infinity.
    NonFinite { what: &'static str },
    /// A precondition on an argument was violated.
    InvalidArgument { message: String },
    /// The regression design matrix was rank deficient.
    SingularRegression { rows: usize, cols: usize },
    /// The weight norm grew more than 10x between iterations.
    TrainingDiverged { iteration: usize, norm: f64 },
    /// A config file failed to parse or validate. `field` names the offender.
    Config { field: String, message: String },
    /// An enum-like string did not match any known variant.
    UnknownKind { what: &'static str, got: String },
    /// A simulation produced non-finite state and was truncated.
    NumericFailure { message: String },
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "dimension mismatch in {what}: expected {expected}, got {got}"),
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::InvalidArgument { message } => write!(f, "invalid argument: {message}"),
            Error::SingularRegression { rows, cols } => write!(
                f,
                "singular regression: {rows} samples cannot determine {cols} coefficients"
            ),
            Error::TrainingDiverged { iteration, norm } => write!(
                f,
                "training diverged at iteration {iteration}: weight norm {norm:.3e}"
            ),
            Error::Config { field, message } => write!(f, "config error in `{field}`: {message}"),
            Error::UnknownKind { what, got } => write!(f, "unknown {what}: `{got}`"),
            Error::NumericFailure { message } => write!(f, "numeric failure: {message}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(message: impl Into<String>) -> Error {
    Error::InvalidArgument {
        message: message.into(),
    }
}
