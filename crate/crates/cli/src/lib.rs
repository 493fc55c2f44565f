//! Config-driven experiment runner for the `spde-inverse` library.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod config;
pub mod convergence;
pub mod csvio;
pub mod error;

pub use bundle::{emit_plot_data, run_pipeline, Metrics};
pub use config::{ExperimentConfig, InitialPreset, Method, PotentialPreset};
pub use convergence::{rate_tables, run_convergence, RateTable, Study};
pub use error::{CliError, Result};

/// Runs `f` on a dedicated rayon pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}
