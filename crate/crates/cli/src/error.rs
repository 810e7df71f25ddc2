use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] airyflow::Error),

    #[error("config {path}: line {line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config {path}: {message}")]
    ConfigMissing { path: PathBuf, message: String },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 1 for failures of the model or the numerics, 2 for bad input.
    pub fn exit_code(&self) -> ExitCode {
        use airyflow::Error as E;
        let code = match self {
            Self::Core(
                E::InvalidArgument(_) | E::InvalidParams(_) | E::Parse(_) | E::GridOutsideDomain(_),
            ) => 2,
            Self::Core(_) => 1,
            Self::Config { .. } | Self::ConfigMissing { .. } | Self::Read { .. } | Self::Usage(_) => 2,
            Self::Write { .. } => 1,
        };
        ExitCode::from(code)
    }
}
