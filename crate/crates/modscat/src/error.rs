use thiserror::Error;

/// Failure of a run or a CLI command, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum RunError {
    /// Bad invocation or unreadable input (exit code 2).
    #[error("usage: {0}")]
    Usage(String),
    /// Malformed or out-of-range configuration (exit code 2).
    #[error("invalid config: {0}")]
    Config(String),
    /// A monitored invariant failed (exit code 1).
    #[error("invariant `{name}` failed: {detail}")]
    Invariant { name: String, detail: String },
    #[error(transparent)]
    Numerical(#[from] modscat_core::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config(_) => 2,
            _ => 1,
        }
    }

    pub fn invariant(name: &str, detail: impl Into<String>) -> Self {
        Self::Invariant { name: name.to_string(), detail: detail.into() }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        Self::Output(e.to_string())
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        Self::Output(e.to_string())
    }
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        Self::Output(e.to_string())
    }
}
