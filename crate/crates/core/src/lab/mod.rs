//! Experiment orchestration: configuration files, runs with their output
//! bundles, checkpoints and resume, and parameter sweeps.

mod checkpoint;
mod config;
mod run;
mod sweep;

pub use checkpoint::{checkpoint_load, checkpoint_save, sidecar_path};
pub use config::{parse_list, RunConfig};
pub use run::{
    checkpoint_path, fit_exponent, ols_slope, read_series, resume, run, RunOutcome, RunStatus,
    Summary, CHECKPOINT_DIR, CONFIG_FILE, FINAL_FILE, SERIES_FILE, SUMMARY_FILE,
};
pub use sweep::{sweep, thread_cap, SweepRow, SweepSpec, SweepTable, THREADS_ENV};

#[cfg(test)]
mod tests;
