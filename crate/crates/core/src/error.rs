use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The map produced a non-finite state.
    #[error("henon map diverged at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("key stream too short: need {needed} states, have {available}")]
    KeyUnderrun { needed: usize, available: usize },

    #[error("zero {what} at index {index}")]
    ZeroDivisor { what: &'static str, index: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("receiver and emitter are coincident")]
    CoincidentPositions,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
