use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The integrand returned NaN or an infinity.
    #[error("non-finite integrand value {value} at {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The truncated dual-lattice sum leaves too much mass in its tail.
    #[error("enumeration radius {radius} too small: tail estimate {tail:e} exceeds {limit:e}")]
    RadiusTooSmall { radius: u64, tail: f64, limit: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
