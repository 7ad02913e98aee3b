use thiserror::Error;

/// Failure categories, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] ipm_core::Error),

    #[error("certification failure: {0}")]
    Certification(String),

    #[error("io failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Certification(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    pub fn io(context: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", context.display()))
    }
}

pub type CliResult<T> = Result<T, CliError>;
