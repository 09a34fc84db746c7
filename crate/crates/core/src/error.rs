use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
///
/// Each variant carries a stable short code (see [`Error::code`]) that the
/// harness reports and maps to process exit codes.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("E_PARAM: {0}")]
    Param(String),

    #[error("E_SYMBOL: {message}")]
    Symbol {
        message: String,
        /// Boundary angle at which the symbol misbehaved, when known.
        angle: Option<f64>,
    },

    #[error("E_CONVERGENCE: {message}")]
    Convergence {
        message: String,
        /// Partial value and refinement trace kept for diagnosis.
        partial: Option<f64>,
        trace: Vec<(usize, f64)>,
    },

    #[error("E_SINGULAR: |1 - z conj(w)| = {distance:e} below threshold")]
    Singular { distance: f64 },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Param(_) => "E_PARAM",
            Error::Symbol { .. } => "E_SYMBOL",
            Error::Convergence { .. } => "E_CONVERGENCE",
            Error::Singular { .. } => "E_SINGULAR",
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence {
            message: msg.into(),
            partial: None,
            trace: Vec::new(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
