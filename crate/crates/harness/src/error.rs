use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("E_CONFIG: {path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Core(#[from] dirikern_core::Error),
    #[error("E_IO: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for a run that ended in this error.
    ///
    /// Parameter errors are rejected configurations; a symbol that fails the
    /// self-map scan is a negative verdict about the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } | HarnessError::Io { .. } => 4,
            HarnessError::Core(e) => match e.code() {
                "E_PARAM" => 4,
                "E_SYMBOL" => 2,
                _ => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
