use bridgex_core::Error as CoreError;
use thiserror::Error;

/// Failure of a command, carrying the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, flag values or column names. No report is written.
    #[error("usage: {0}")]
    Usage(String),
    #[error("data: {0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidGamma(_)
            | CoreError::InvalidPenalty(_)
            | CoreError::InvalidConfig(_)
            | CoreError::InvalidSpec(_)
            | CoreError::EmptyGrid => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

/// How a command that produced a report finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotConverged,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::NotConverged => 3,
        }
    }

    pub fn from_converged(converged: bool) -> Self {
        if converged {
            Status::Ok
        } else {
            Status::NotConverged
        }
    }
}
