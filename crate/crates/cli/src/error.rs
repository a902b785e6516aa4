//! Harness error type with process exit codes: 2 for configuration and
//! format problems, 3 for numeric failures.

use std::fmt;

use rankscope_core::Error as CoreError;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug)]
pub enum CliError {
    /// Bad command-line usage.
    Usage(String),
    /// Invalid configuration, file format, or mismatched artifacts.
    Config(String),
    /// Filesystem trouble.
    Io(String),
    /// Numeric failure (divergence, unfit, ill-conditioned system).
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Numeric(msg) => write!(f, "numeric failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Divergence { .. }
            | CoreError::Unfit { .. }
            | CoreError::IllConditioned
            | CoreError::InvalidMatrix => CliError::Numeric(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
