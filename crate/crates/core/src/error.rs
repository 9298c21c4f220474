use thiserror::Error;

/// Errors raised by the dyadic analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid resolution {0}: must lie in 1..={max}", max = crate::dyadic::MAX_RESOLUTION)]
    InvalidResolution(u32),

    #[error("resolution mismatch: {left} vs {right}")]
    ResolutionMismatch { left: u32, right: u32 },

    #[error("rank {rank} is finer than resolution {resolution}")]
    ResolutionTooCoarse { rank: u32, resolution: u32 },

    #[error("index {index} out of range for resolution {resolution}")]
    OutOfRange { index: usize, resolution: u32 },

    #[error("frequency {frequency} exceeds 2^{resolution}")]
    FrequencyAboveResolution { frequency: usize, resolution: u32 },

    #[error("invalid count {0}: must be at least 1")]
    InvalidCount(usize),

    #[error("invalid range: maximal order {0} must be at least 2")]
    InvalidRange(usize),

    #[error("Cesaro parameter {0} is a pole (alpha must exceed -1)")]
    Pole(f64),

    #[error("alpha {0} outside (0, 1]")]
    AlphaOutOfRange(f64),

    #[error("invalid exponent {0}: must be positive")]
    InvalidExponent(f64),

    #[error("value vector has length {len}, expected 2^{resolution}")]
    LengthMismatch { len: usize, resolution: u32 },

    #[error("levels do not form a martingale")]
    InvalidMartingale,

    #[error("bit sequence entry {0} is not 0 or 1")]
    InvalidBit(u8),
}

pub type Result<T> = std::result::Result<T, Error>;
