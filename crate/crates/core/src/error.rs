use std::path::PathBuf;

use thiserror::Error;

use crate::lp::SolverError;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar was outside the domain of the function (negative SNR, NaN, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Channel gains or a scenario violated an ordering or range rule.
    #[error("validation error: {0}")]
    Validation(String),

    /// A caller-supplied parameter was out of range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The LP engine failed. `context` says which ray or formulation was being solved.
    #[error("solver error while solving {context}: {source}")]
    Solver {
        context: String,
        #[source]
        source: SolverError,
    },

    /// The LP reported infeasible/unbounded where the formulation guarantees an optimum.
    #[error("unexpected LP status {status} while solving {context}")]
    UnexpectedStatus { context: String, status: String },

    /// Two regions built on different channels were compared.
    #[error("comparison error: {0}")]
    Comparison(String),

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn solver(context: impl Into<String>, source: SolverError) -> Self {
        Error::Solver { context: context.into(), source }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// The same error with `location` (for example the failing ray) added to its message.
    pub(crate) fn at(self, location: &str) -> Self {
        let tag = |m: String| format!("{m} (at {location})");
        match self {
            Error::Domain(m) => Error::Domain(tag(m)),
            Error::Validation(m) => Error::Validation(tag(m)),
            Error::Parameter(m) => Error::Parameter(tag(m)),
            Error::Comparison(m) => Error::Comparison(tag(m)),
            Error::Solver { context, source } => Error::Solver { context: tag(context), source },
            Error::UnexpectedStatus { context, status } => Error::UnexpectedStatus { context: tag(context), status },
            other => other,
        }
    }

    /// Process exit code used by the CLI: 2 validation, 3 solver, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::Validation(_)
            | Error::Parameter(_)
            | Error::Comparison(_)
            | Error::Parse { .. } => 2,
            Error::Solver { .. } | Error::UnexpectedStatus { .. } => 3,
            Error::Io { .. } => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
