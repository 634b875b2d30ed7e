use thiserror::Error;

use crate::spectral::Space;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field lives in {found:?} space, expected {expected:?}")]
    WrongSpace { expected: Space, found: Space },

    #[error("fields are defined on different grids")]
    GridMismatch,

    #[error("operator is singular at t = 0")]
    SingularTime,

    #[error("rescaled support leaves the grid: {0}")]
    SupportOverflow(String),

    #[error("non-finite sample produced by {0}")]
    NonFinite(&'static str),

    #[error("time must increase monotonically (previous {previous}, requested {requested})")]
    NonMonotoneTime { previous: f64, requested: f64 },

    #[error("step from tau = {tau} by {dt} reaches the pseudoconformal singularity tau = 1")]
    CrossesSingularity { tau: f64, dt: f64 },

    #[error("time mismatch: expected {expected}, found {found}")]
    TimeMismatch { expected: f64, found: f64 },

    #[error("field is not radially symmetric (angular variance {0:e})")]
    NotRadial(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
