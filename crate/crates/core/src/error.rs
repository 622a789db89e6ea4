use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension { what: &'static str, expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("invalid problem: {0}")]
    Invariant(String),

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },

    #[error("inner problem not strongly concave (alpha = 0 and Q + Q^T is singular)")]
    NotStronglyConcave,

    #[error("inner solver did not converge in {iterations} iterations (residual {residual:e})")]
    InnerNotConverged { iterations: usize, residual: f64, best: Vec<f64> },

    #[error("no applicable Lipschitz bound for this box and alpha")]
    NoApplicableBound,

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { what, expected, got })
    }
}
