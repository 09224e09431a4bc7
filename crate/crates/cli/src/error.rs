use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] polaron_core::Error),
    #[error("{0}")]
    Io(String),
    #[error("{failed} of {total} sweep points failed")]
    PartialFailure { failed: usize, total: usize },
}

impl CliError {
    /// 2 configuration, 3 numerical failure, 4 partial sweep failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io(_) => 2,
            Self::Core(e) if !e.is_numerical() => 2,
            Self::Core(_) => 3,
            Self::PartialFailure { .. } => 4,
        }
    }
}

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
