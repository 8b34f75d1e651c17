use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix determinant is {det}, expected 1")]
    Determinant { det: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("insufficient decay at grid edges: edge/peak = {ratio:.3e} exceeds {limit:.1e}")]
    InsufficientDecay { ratio: f64, limit: f64 },

    #[error("signal has zero energy")]
    ZeroEnergy,

    #[error("sampling rate {rate} is below the minimum {min_rate}")]
    Undersampled { rate: f64, min_rate: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("malformed signal file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for failures caused by numerical preconditions (grids, decay,
    /// sampling rates) rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::GridTooCoarse(_)
                | Error::InsufficientDecay { .. }
                | Error::ZeroEnergy
                | Error::Undersampled { .. }
                | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
