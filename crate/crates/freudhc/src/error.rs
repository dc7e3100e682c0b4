use std::path::PathBuf;

use thiserror::Error;

/// Failures of the harness, grouped by the exit code they map to.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad flags, a config that does not validate, or an unknown corpus id.
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("numerical failure in {context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: freudhc_core::Error,
    },
    /// At least one acceptance criterion failed under `--check`.
    #[error("{failed} of {total} acceptance criteria failed")]
    CheckFailed { failed: usize, total: usize },
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// 0 ok, 1 numerical failure, 2 usage/config.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Json { .. } => 2,
            HarnessError::Numerical { source, .. } if is_parameter_error(source) => 2,
            HarnessError::Io { .. } | HarnessError::Csv(_) => 2,
            HarnessError::Numerical { .. } | HarnessError::CheckFailed { .. } => 1,
        }
    }
}

fn is_parameter_error(e: &freudhc_core::Error) -> bool {
    matches!(e, freudhc_core::Error::InvalidParameter { .. } | freudhc_core::Error::WrongLambda { .. })
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Attaches a context string to core errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Context<T> for freudhc_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| HarnessError::Numerical { context: what(), source })
    }
}
