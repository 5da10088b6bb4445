use meanswitch_core::ErrorClass;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] meanswitch_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("malformed input: {0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn class(&self) -> ErrorClass {
        match self {
            CliError::Core(e) => e.class(),
            CliError::Usage(_) | CliError::Input(_) | CliError::Io { .. } => ErrorClass::Parse,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Parse => 2,
            ErrorClass::Validation => 3,
            ErrorClass::Numerical => 4,
        }
    }

    /// Machine-readable form written to standard error.
    pub fn to_json(&self) -> serde_json::Value {
        let class = match self.class() {
            ErrorClass::Parse => "parse",
            ErrorClass::Validation => "validation",
            ErrorClass::Numerical => "numerical",
        };
        json!({"error": {"class": class, "exit_code": self.exit_code(), "message": self.to_string()}})
    }
}

pub type CliResult<T> = Result<T, CliError>;
