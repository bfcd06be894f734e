use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid Schur parameters: {0}")]
    InvalidParams(String),

    #[error("numeric failure in {context} (residual {residual:e})")]
    NumericFailure { context: String, residual: f64 },

    #[error("backward pairing failed at step {step}: kernel projection norm {projection_norm:e}")]
    PairingFailure { step: usize, projection_norm: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl LabError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidInput(msg.into())
    }

    pub(crate) fn dims(expected: impl Into<String>, found: impl Into<String>) -> Self {
        LabError::DimensionMismatch {
            expected: expected.into(),
            found: found.into(),
        }
    }

    pub(crate) fn numeric(context: impl Into<String>, residual: f64) -> Self {
        LabError::NumericFailure {
            context: context.into(),
            residual,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
