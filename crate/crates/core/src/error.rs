use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Bloch vector longer than one does not describe a physical state.
    #[error("bloch vector norm {norm} exceeds 1")]
    BlochViolation { norm: f64 },

    #[error("non-finite value {value} at {location}")]
    NumericFailure { value: f64, location: String },

    /// An outcome that is not an eigenvalue of the measured observable.
    #[error("outcome {value} lies outside the spectrum {spectrum:?}")]
    SpectrumViolation { value: f64, spectrum: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;
