use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] npspectra::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: not a result document: {source}", path.display())]
    Document {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{} check(s) failed: {}", .0.len(), .0.join("; "))]
    Checks(Vec<String>),
}

impl CliError {
    /// 2 for invalid configuration, 3 for failed invariant checks, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Checks(_) => 3,
            _ => 1,
        }
    }
}
