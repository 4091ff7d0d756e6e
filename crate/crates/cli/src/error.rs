use std::io;

use thiserror::Error;

/// Failure classes, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(tim_core::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Core(_) | CliError::Io(_) | CliError::Csv(_) => 3,
        }
    }
}

impl From<tim_core::Error> for CliError {
    /// Bad parameters and unreadable inputs are the caller's fault; anything
    /// else is internal.
    fn from(e: tim_core::Error) -> Self {
        use tim_core::Error as E;
        match &e {
            E::InvalidParameter(_)
            | E::InvalidTopology(_)
            | E::UnknownNode(_)
            | E::SelfLoop(_)
            | E::Unassigned(_)
            | E::DimensionMismatch { .. }
            | E::OverCap { .. }
            | E::StreamsExceedDimension { .. }
            | E::CheckpointMismatch(_)
            | E::Json(_) => CliError::Usage(e.to_string()),
            E::Io(io) if io.kind() == io::ErrorKind::NotFound => CliError::Usage(e.to_string()),
            _ => CliError::Core(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
