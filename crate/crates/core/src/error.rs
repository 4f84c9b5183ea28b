use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice extents must be at least 2 in each direction, got {l}x{t}")]
    InvalidGeometry { l: usize, t: usize },

    #[error("field shape mismatch: expected {expected} entries, got {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverNotConverged { iterations: usize, residual: f64 },

    #[error("invalid integrator setup: {0}")]
    InvalidIntegrator(String),

    #[error("unknown integration scheme `{0}`")]
    UnknownScheme(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("malformed gauge configuration file {path}: {message}")]
    GaugeFile { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
