use alloc::string::String;

use thiserror::Error;

/// A violated problem-instance invariant.
///
/// `field` names the offending key exactly as it appears in configuration
/// files, with a `[t]` suffix for per-stage entries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{field} must be > 0 (got {value})")]
    NotPositive { field: String, value: f64 },
    #[error("{field} must be >= 0 (got {value})")]
    Negative { field: String, value: f64 },
    #[error("{field} must be finite (got {value})")]
    NotFinite { field: String, value: f64 },
    #[error("{field} must be in [0, 1] (got {value})")]
    OutOfUnitInterval { field: String, value: f64 },
    #[error("{field} must have length {expected_rule} (expected {expected}, got {got})")]
    WrongLength {
        field: String,
        expected_rule: &'static str,
        expected: usize,
        got: usize,
    },
}

impl ParamError {
    /// Configuration key of the violated invariant.
    pub fn field(&self) -> &str {
        match self {
            ParamError::NotPositive { field, .. }
            | ParamError::Negative { field, .. }
            | ParamError::NotFinite { field, .. }
            | ParamError::OutOfUnitInterval { field, .. }
            | ParamError::WrongLength { field, .. } => field,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(#[from] ParamError),
    /// Solver precondition: the decision rules divide by the power weight.
    #[error("theta must be > 0 for this solver (got {0}); theta = 0 leaves the encoder power unbounded")]
    NonPositiveTheta(f64),
    #[error("encoder best response is undefined: alpha^2 K^2 + theta = 0")]
    NoUniqueEncoderResponse,
    #[error("degenerate observation: innovation variance {0} <= 0")]
    DegenerateObservation(f64),
    #[error("{what} has length {got}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
