//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input: non-finite coordinates, missing labels, bad shapes.
    InvalidInput(String),
    /// A point's dimension does not match the model or point set.
    DimensionMismatch { expected: usize, actual: usize },
    /// The null variance of the statistic is not positive.
    DegenerateVariance,
    /// Training data contains a single class.
    DegenerateTraining,
    /// All posteriors in the instance are identical.
    DegenerateInstance,
    /// The target prior lies outside the range of the posteriors.
    Infeasible,
    /// Fewer unlabeled points remain than the selection needs.
    PoolExhausted,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::DegenerateVariance => write!(f, "null variance of the statistic is not positive"),
            Error::DegenerateTraining => write!(f, "training data contains a single class"),
            Error::DegenerateInstance => write!(f, "all posteriors are identical"),
            Error::Infeasible => write!(f, "target prior lies outside the posterior range"),
            Error::PoolExhausted => write!(f, "not enough unlabeled points left to select"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
