use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value in {what} at flat index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("operator plan exceeds caps: {0}")]
    PlanExceedsCaps(String),

    #[error("blow-up guard tripped at t = {t}: max|U| = {max_abs} exceeds {limit}")]
    BlowUp { t: f64, max_abs: f64, limit: f64 },

    #[error("time step {dt} exceeds the CFL limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed snapshot: {0}")]
    SnapshotFormat(String),

    #[error("snapshot {path}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
