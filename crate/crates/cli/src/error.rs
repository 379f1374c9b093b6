use thiserror::Error;

use skewdiff_core::Error as CoreError;

/// Exit code when every gate passes.
pub const EXIT_PASS: i32 = 0;
/// Exit code when an acceptance gate fails.
pub const EXIT_GATE_FAILED: i32 = 1;
/// Exit code for invalid configuration.
pub const EXIT_INVALID_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid configuration: {0}")]
    Precondition(CoreError),
    #[error("computation failed: {0}")]
    Numeric(CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Precondition(_) => EXIT_INVALID_CONFIG,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_GATE_FAILED,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NumericFailure(_) => CliError::Numeric(e),
            other => CliError::Precondition(other),
        }
    }
}
