use thiserror::Error;

/// Exit code for a configuration or argument error.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for a numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;
/// Exit code for a failure to write outputs.
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {key}: {message}")]
    Config { key: String, message: String },
    #[error("config error: line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },
    #[error("numerical failure: {0}")]
    Numerical(#[from] symheat::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::ConfigSyntax { .. } => EXIT_CONFIG,
            Self::Numerical(_) => EXIT_NUMERICAL,
            Self::Io(_) => EXIT_IO,
        }
    }
}
