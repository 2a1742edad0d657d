use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (defect {defect:e} exceeds {tolerance:e})")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("drive is not resonant with |0> <-> |1> (E'1 - E'0 = {detuning:e})")]
    NotResonant { detuning: f64 },

    #[error("density matrix is in the {found:?} picture, expected {expected:?}")]
    WrongPicture {
        expected: crate::state::Picture,
        found: crate::state::Picture,
    },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("sweep point {grid} failed: {source}")]
    SweepPoint {
        grid: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
