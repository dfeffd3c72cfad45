use thiserror::Error;

/// Failures of a command, each with its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or inputs the command cannot accept.
    #[error("{0}")]
    Usage(String),
    /// A computation produced a non-finite value.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// A verification suite found a counterexample. Carries the report.
    #[error("suite failed")]
    SuiteFailed(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numeric(_) => 2,
            CliError::SuiteFailed(_) => 3,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    /// A usage error naming the library error variant and its message.
    pub fn usage_from<E: std::fmt::Debug + std::fmt::Display>(e: E) -> Self {
        CliError::Usage(format!("{e:?}: {e}"))
    }
}
