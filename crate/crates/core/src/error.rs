use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Best iterate available when the simplex solver hits its iteration cap.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSolution {
    pub weights: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource cap exceeded for {what}: {required:.3e} > {cap:.3e}")]
    ResourceLimit {
        what: &'static str,
        required: f64,
        cap: f64,
    },

    #[error("lattice construction failed: {0}")]
    Construction(String),

    #[error("ill-conditioned matrix (condition estimate {0:.3e})")]
    IllConditioned(f64),

    #[error("non-finite function value at node {index}")]
    NonFinite { index: usize },

    #[error("simplex did not converge within {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        best: Option<PartialSolution>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code: 2 argument/input error, 3 resource cap, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 2,
            Error::ResourceLimit { .. } => 3,
            Error::Construction(_)
            | Error::IllConditioned(_)
            | Error::NonFinite { .. }
            | Error::NonConvergence { .. } => 4,
        }
    }
}

/// Fails with [`Error::ResourceLimit`] when `required` exceeds `cap`.
pub(crate) fn check_cap(what: &'static str, required: f64, cap: f64) -> Result<()> {
    if required > cap {
        Err(Error::ResourceLimit {
            what,
            required,
            cap,
        })
    } else {
        Ok(())
    }
}
