use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("derivative order {0} not supported (max 2)")]
    InvalidDerivative(usize),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("point outside the deck: {0}")]
    OutOfDomain(String),

    #[error("step size underflow at t = {t:.6e} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("non-finite state first detected at t = {t:.6e}")]
    NonFinite { t: f64 },

    #[error("damping outside the underdamped branch: {0}")]
    OverdampedBranch(String),

    #[error("resonant case for mode {mode}: particular solution has secular growth")]
    ResonantCase { mode: usize },

    #[error("{0}")]
    Unsupported(String),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("empty grid: {0}")]
    EmptyGrid(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
