use serde_json::json;

use crate::checkpoint::CheckpointError;

/// Command failures, split by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: configuration, arguments, files, or a failed check.
    #[error("{0}")]
    Validation(String),
    /// The numerics broke down: blow-up, quadrature or extrapolation failure.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 1,
            Self::Numerical(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Validation(_) => "validation",
            Self::Numerical(_) => "numerical",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() })
    }
}

impl From<sqg_core::Error> for CliError {
    fn from(e: sqg_core::Error) -> Self {
        use sqg_core::Error::*;
        match e {
            BlowUp { .. } | Cfl { .. } | Quadrature { .. } | Extrapolation { .. } | UnresolvedTail { .. } => {
                Self::Numerical(e.to_string())
            }
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Validation(format!("i/o error: {e}"))
    }
}

impl From<CheckpointError> for CliError {
    fn from(e: CheckpointError) -> Self {
        Self::Validation(format!("checkpoint: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Validation(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Validation(format!("json: {e}"))
    }
}
