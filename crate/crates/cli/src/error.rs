use std::path::PathBuf;

/// Failure of a command, carrying the pipeline stage it arose in.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: fracharm_core::Error,
    },

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn stage(stage: &'static str) -> impl FnOnce(fracharm_core::Error) -> CliError {
        move |source| CliError::Stage { stage, source }
    }

    pub fn output(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Output { path, source }
    }

    /// Process exit status: 1 input, 2 numeric failure, 3 configuration.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 3,
            CliError::Output { .. } => 1,
            CliError::Stage { source, .. } if source.is_input() => 1,
            CliError::Stage { source, .. } if source.is_numeric() => 2,
            CliError::Stage {
                source:
                    fracharm_core::Error::InvalidArgument(_) | fracharm_core::Error::TooLarge { .. },
                ..
            } => 3,
            CliError::Stage { .. } => 2,
        }
    }
}
