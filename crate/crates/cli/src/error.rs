use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown subcommand `{0}`")]
    UnknownCommand(String),
    #[error("invalid `{field}`: {reason}")]
    Schema { field: String, reason: String },
    #[error("config line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("cannot write report: {0}")]
    Output(#[from] std::io::Error),
    #[error(transparent)]
    Module(#[from] bellman_lab::Error),
}

impl CliError {
    pub fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Schema { field: field.into(), reason: reason.into() }
    }

    /// 2 for anything the user can fix on the command line, including a
    /// parameter the library rejects; 3 for numeric and I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::UnknownCommand(_) | Self::Schema { .. } | Self::Syntax { .. } | Self::Module(bellman_lab::Error::Param { .. }) => 2,
            Self::Output(_) | Self::Module(_) => 3,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Output(std::io::Error::other(e))
    }
}
