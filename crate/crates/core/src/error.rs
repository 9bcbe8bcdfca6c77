use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{lambda} is not an eigenvalue of the matrix (rank of A - lambda I is full)")]
    NotEigenvalue { lambda: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("inconsistent chain system at vector {index} (residual {residual:e})")]
    InconsistentChain { index: usize, residual: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("vacuum state: density {density} is not positive")]
    Vacuum { density: f64 },

    #[error("solution blew up in cell {cell} at t = {time}")]
    BlowUp { cell: usize, time: f64 },

    #[error("oracle failed: {0}")]
    Oracle(String),

    #[error("not a compressive Riemann problem: u_L = {u_left} < u_R = {u_right}")]
    NotCompressive { u_left: f64, u_right: f64 },

    #[error("metric failed: {0}")]
    Metric(String),

    #[error("unknown case `{0}`")]
    UnknownCase(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
