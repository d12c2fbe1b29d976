use std::path::PathBuf;

use thiserror::Error;

/// Process exit statuses.
pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOW_UP: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{location}: {message}")]
    Config { location: String, message: String },

    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("numerical blow-up at t = {t}; last good state written to {snapshot}")]
    BlowUp { t: f64, snapshot: PathBuf },

    #[error(transparent)]
    Core(#[from] tns_core::Error),
}

impl CliError {
    pub fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BlowUp { .. } | CliError::Core(tns_core::Error::BlowUp { .. }) => EXIT_BLOW_UP,
            _ => EXIT_CONFIG,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
