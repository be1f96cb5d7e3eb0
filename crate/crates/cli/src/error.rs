use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical error at {context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: bandpip_core::Error,
    },

    #[error("output error: {0}")]
    Io(String),
}

impl CliError {
    pub fn numerical(context: impl Into<String>, source: bandpip_core::Error) -> Self {
        CliError::Numerical {
            context: context.into(),
            source,
        }
    }

    /// 1 for configuration problems, 2 for failures during the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical { .. } | CliError::Io(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
