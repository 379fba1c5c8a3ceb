use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration at `{path}`: {message}")]
    ConfigInvalid { path: String, message: String },
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: daylight_core::Error,
    },
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        ExperimentError::ConfigInvalid { path: path.into(), message: message.into() }
    }

    /// Process exit code: 2 for configuration errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::ConfigInvalid { .. } => 2,
            ExperimentError::Stage { source, .. } => match source {
                daylight_core::Error::Io(_) => 1,
                daylight_core::Error::InvalidInput(_) => 2,
                _ => 3,
            },
            ExperimentError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

/// Attaches a stage name to core errors.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for daylight_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|source| ExperimentError::Stage { stage, source })
    }
}
