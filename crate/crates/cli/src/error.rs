use dispersive::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOW_UP: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input file {path}: {message}")]
    Input { path: String, message: String },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::BlowUp { .. } | CoreError::Range(_) | CoreError::Pole) => EXIT_BLOW_UP,
            CliError::Verification(_) => EXIT_VERIFICATION,
            _ => EXIT_CONFIG,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input { path: "csv".into(), message: e.to_string() }
    }
}
