use std::path::PathBuf;
use std::process::ExitCode;

use estc::ErrorKind;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Parse(serde_json::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot start the thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Estc(#[from] estc::Error),
    #[error("the window holds {found} of the two doublet lines")]
    NoDoublet { found: usize },
    #[error("{check} failed: {detail}")]
    CheckFailed { check: &'static str, detail: String },
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Read { .. } => "config.read",
            CliError::Parse(_) => "config.parse",
            CliError::Invalid(_) => "config.parameter",
            CliError::Write { .. } => "output.write",
            CliError::Threads(_) => "runtime.threads",
            CliError::Estc(e) => e.code(),
            CliError::NoDoublet { .. } => "spectral.no_doublet",
            CliError::CheckFailed { check, .. } => check,
        }
    }

    fn kind(&self) -> ErrorKind {
        match self {
            CliError::Read { .. }
            | CliError::Parse(_)
            | CliError::Invalid(_)
            | CliError::Write { .. }
            | CliError::Threads(_) => ErrorKind::Config,
            CliError::Estc(e) => e.kind(),
            CliError::NoDoublet { .. } => ErrorKind::Numerical,
            CliError::CheckFailed { .. } => ErrorKind::Consistency,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self.kind() {
            ErrorKind::Config => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Consistency => 4,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self.kind() {
            ErrorKind::Config => "config",
            ErrorKind::Numerical => "numerical",
            ErrorKind::Consistency => "consistency",
        };
        json!({ "error": { "code": self.code(), "kind": kind, "message": self.to_string() } })
    }
}
