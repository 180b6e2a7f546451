//! Run-level errors and their exit codes.

use hawking_core::LabError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    /// Bad config, bad flags or parameters outside the admissible range.
    #[error("validation error: {0}")]
    Validation(String),
    /// A numerical routine failed or a criterion was not met.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) | RunError::Io(_) => 1,
            RunError::Numerical(_) => 2,
        }
    }
}

impl From<LabError> for RunError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::SubextremalViolation(_)
            | LabError::InvalidParameter(_)
            | LabError::DomainError(_)
            | LabError::PositivityGateFailed(_) => RunError::Validation(e.to_string()),
            other => RunError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subextremal_violation_is_a_validation_error() {
        assert_eq!(RunError::from(LabError::SubextremalViolation(1.2)).exit_code(), 1);
        assert_eq!(RunError::from(LabError::FitRejected("x".into())).exit_code(), 2);
    }
}
