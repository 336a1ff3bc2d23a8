//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by channel generation, precoder design, and the sweep
/// harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A dimension precondition was violated (shape mismatch, bad count).
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// A scalar parameter is outside its allowed range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Channel generation was asked to sum over an empty path list.
    #[error("path list is empty")]
    EmptyPaths,

    /// Two vectors that must have equal length do not.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// A feed or subarray index is outside the channel's column range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// Waterfilling was called with no positive eigenmode gain.
    #[error("all eigenmode gains are zero")]
    AllGainsZero,

    /// A power constraint cannot be enforced on an all-zero precoder.
    #[error("zero-norm precoder")]
    ZeroNormPrecoder,

    /// A matrix or scalar input contains NaN or infinity.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// The experiment configuration is invalid; the message names the
    /// offending field by its dotted path.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
