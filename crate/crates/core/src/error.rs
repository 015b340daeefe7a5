use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {requested} exceeds the configured maximum {limit}")]
    Size { requested: u128, limit: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("solver did not converge after {iterations} iterations: {reason}")]
    Solver { iterations: usize, reason: String },

    #[error("transfer operator is defective near eigenvalue {eigenvalue} (cluster of {multiplicity})")]
    Diagonalization { eigenvalue: Complex64, multiplicity: usize },

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("critical parameter: lambda_{index} = 1")]
    Critical { index: usize },

    #[error("phase labels differ: {from:?} vs {to:?}, no gapped path exists")]
    PhaseObstruction { from: (usize, usize), to: (usize, usize) },

    #[error("linear algebra backend: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn certification(msg: impl Into<String>) -> Self {
        Error::Certification(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_)
            | Error::Size { .. }
            | Error::Critical { .. }
            | Error::Json(_) => 2,
            Error::Certification(_) | Error::PhaseObstruction { .. } => 3,
            Error::Solver { .. } | Error::Diagonalization { .. } | Error::Linalg(_) => 4,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
