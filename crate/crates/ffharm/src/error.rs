use thiserror::Error;

/// Failure classes, each with a fixed process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or parameters rejected by the core library.
    #[error("{0}")]
    Invalid(String),
    /// A suite ran and at least one check failed.
    #[error("{0}")]
    SuiteFailed(String),
    #[error("cache write failed: {0}")]
    CacheWrite(String),
    #[error("output write failed: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SuiteFailed(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::CacheWrite(_) | CliError::Output(_) => 3,
        }
    }

    pub(crate) fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Invalid(e.to_string())
    }
}
