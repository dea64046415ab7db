use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] distlaw_core::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// 2 for usage and parse errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::Core(distlaw_core::Error::Parse { .. } | distlaw_core::Error::Arity { .. }) => 2,
            _ => 1,
        }
    }
}
