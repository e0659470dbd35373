//! Crate-wide error type.

use num_complex::Complex64;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on caller-supplied data was violated.
    InvalidArgument(String),
    /// The operation was called on a value in the wrong state
    /// (e.g. a resonance witness for a non-resonant classification).
    InvalidState(String),
    /// Not enough samples/span to carry out the analysis.
    InsufficientData(String),
    /// The quantity is undefined for these inputs (e.g. the L-infinity
    /// bound when the period ratio is an integer).
    NotApplicable(String),
    /// A float could not be snapped to an exact representation within the
    /// caller's tolerance. Carries the best residual achieved.
    NoExactRepresentation { residual: f64 },
    /// Adaptive integration could not reach the requested tolerance.
    /// Carries the best estimate and its error bound.
    AccuracyFailure { estimate: f64, error_bound: f64 },
    /// A transform was requested too close to a pole. Carries the
    /// numerator value so callers can do their own limiting.
    PoleProximity { numerator: Complex64 },
    /// A valid combination of inputs that this build does not handle
    /// (e.g. damped response to non-sinusoidal forcing).
    UnsupportedCombination(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Self::InvalidState(msg) => write!(f, "invalid state: {msg}"),
            Self::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
            Self::NotApplicable(msg) => write!(f, "not applicable: {msg}"),
            Self::NoExactRepresentation { residual } => {
                write!(f, "no exact representation within tolerance (residual {residual:e})")
            }
            Self::AccuracyFailure { estimate, error_bound } => write!(
                f,
                "integration accuracy failure: best estimate {estimate:e} with error bound {error_bound:e}"
            ),
            Self::PoleProximity { numerator } => write!(
                f,
                "evaluation point too close to a pole (numerator {} + {}i)",
                numerator.re, numerator.im
            ),
            Self::UnsupportedCombination(msg) => write!(f, "unsupported combination: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI contract: 2 for invalid input,
    /// 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::AccuracyFailure { .. } | Self::PoleProximity { .. } => 3,
            _ => 2,
        }
    }
}
