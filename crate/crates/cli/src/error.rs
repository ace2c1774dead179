use thiserror::Error;

/// Errors surfaced by the command-line front end, each with its exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("io: {0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => crate::EXIT_USAGE,
            CliError::Resolution(_) => crate::EXIT_RESOLUTION,
            CliError::Io(_) | CliError::Failed(_) => crate::EXIT_FAILURE,
        }
    }
}

impl From<hlmax_core::Error> for CliError {
    fn from(e: hlmax_core::Error) -> Self {
        use hlmax_core::Error as E;
        match e {
            E::Resolution(m) => CliError::Resolution(m),
            E::InvalidArgument(m) => CliError::Usage(m),
            E::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
