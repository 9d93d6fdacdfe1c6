//! Experiment runner: configs, single runs, sweeps, provider comparisons and
//! the static resource proxy.

mod compare;
mod config;
mod run;
mod sweep;
mod tools;

pub use compare::{compare, compare_runs, CompareRow, CompareSummary, Comparison};
pub use config::{DataConfig, ExperimentConfig, FewShotConfig, TaskConfig};
pub use run::{execute, resources, run, summary_line, write_run_outputs};
pub use sweep::{
    aggregate, mean_std, sweep, sweep_cells, CellOutcome, RunRecord, SweepAxis, SweepCell,
    SweepResult,
};
pub use tools::{lut_dump, rng_emit};

/// Process exit status for a finished run.
pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_DIVERGED: i32 = 2;
pub const EXIT_ERROR: i32 = 3;
