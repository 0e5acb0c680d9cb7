use thiserror::Error;

/// Failures that stop a run, each with its own process exit code.
/// A verification that merely fails is not an error; see [`crate::Report`].
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("{0}")]
    SizeLimit(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
            CliError::SizeLimit(_) => 4,
        }
    }
}

impl From<qtopos::Error> for CliError {
    fn from(e: qtopos::Error) -> Self {
        match e {
            qtopos::Error::SizeLimit { .. } => CliError::SizeLimit(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
