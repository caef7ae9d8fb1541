use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("quadrature rule has {nodes} nodes per axis but cutoff {cutoff} needs at least {required}")]
    InsufficientQuadrature {
        nodes: usize,
        cutoff: usize,
        required: usize,
    },

    #[error("small-jump mark must satisfy 0 < |x| < 1, got |x| = {0}")]
    SmallMarkOutOfRange(f64),

    #[error("large-jump mark must satisfy |x| >= 1, got |x| = {0}")]
    LargeMarkOutOfRange(f64),

    #[error("shift {eta} outside [0, {horizon}]")]
    ShiftOutOfRange { eta: f64, horizon: f64 },

    #[error("non-finite state at t = {time} (step {step}); numerical blow-up, not a modelled explosion")]
    NumericalBlowUp { time: f64, step: usize },

    #[error("truncation levels {lower} and {upper} disagree at t = {time}, before the exit time of level {lower}")]
    LevelInconsistency { lower: f64, upper: f64, time: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed document: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
