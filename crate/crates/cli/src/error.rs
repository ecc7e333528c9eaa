use std::path::PathBuf;

/// Failures surfaced by the harness, labelled with where they happened.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("config file {}: {message}", path.display())]
    ConfigFile { path: PathBuf, message: String },
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        source: helmsrc_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn config_err(key: &str, message: impl Into<String>) -> HarnessError {
    HarnessError::Config { key: key.to_owned(), message: message.into() }
}

/// Attaches a stage label to core errors.
pub(crate) trait StageExt<T> {
    fn stage(self, label: impl FnOnce() -> String) -> Result<T>;
}

impl<T> StageExt<T> for helmsrc_core::Result<T> {
    fn stage(self, label: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| HarnessError::Stage { stage: label(), source })
    }
}
