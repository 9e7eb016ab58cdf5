use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {message}", path.display())]
    MissingInput { path: PathBuf, message: String },

    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] nanogrid_core::Error),
}

impl CliError {
    /// 2 for problems with the invocation or its inputs, 1 for failures
    /// while computing or writing results.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::MissingInput { .. } | CliError::Config { .. } | CliError::Invalid(_) => 2,
            CliError::Core(nanogrid_core::Error::Schema { .. }) => 2,
            CliError::Core(_) => 1,
        }
    }
}
