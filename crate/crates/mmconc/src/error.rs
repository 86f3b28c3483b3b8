use thiserror::Error;

/// Failures that stop a run. Row-level failures are collected in the run
/// outcome instead.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("{source_name}:{line}:{column}: {message}")]
    Config {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration at {field}: {message}")]
    Invalid { field: String, message: String },
    #[error("unknown builtin scenario {0:?}")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl AppError {
    pub fn invalid(field: impl Into<String>, message: impl ToString) -> Self {
        AppError::Invalid {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const ASSERTION: i32 = 2;
    pub const PARTIAL: i32 = 3;
}
