use alloc::string::String;

/// Errors raised by the statistical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("feature {index} has zero pooled variance")]
    ZeroVariance { index: usize },
    #[error("r = {r} does not exceed the boundary {boundary}: point lies in the failure region")]
    FailureRegion { r: f64, boundary: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
