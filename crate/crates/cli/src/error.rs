use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Compute {
        context: String,
        #[source]
        source: nlberry::Error,
    },
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit code: 2 for usage and config errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute { .. } | CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn compute(context: impl Into<String>) -> impl FnOnce(nlberry::Error) -> Self {
        let context = context.into();
        move |source| CliError::Compute { context, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
