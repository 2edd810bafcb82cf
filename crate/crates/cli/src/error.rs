use std::path::Path;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or invalid configuration.
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] deltaclip_core::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub(crate) fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Config(m) if !m.starts_with(&*path.to_string_lossy()) => {
                CliError::Config(format!("{}: {m}", path.display()))
            }
            other => other,
        }
    }

    pub(crate) fn in_field(self, field: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{field}: {m}")),
            other => other,
        }
    }

    /// Process exit status: every error that reaches `main` is a usage,
    /// config or environment problem.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
