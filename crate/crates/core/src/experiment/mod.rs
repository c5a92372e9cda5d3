//! JSON-configured experiments: single runs and scaling sweeps.

mod config;
mod run;
mod sweep;

pub use config::{ConfigError, ExperimentConfig, FieldError, ExperimentKind, LabelMode, OutputPaths, SEED_ENV};
pub use run::{run_experiment, run_flh, write_outcome, ExperimentOutcome};
pub use sweep::{loglog_slope, run_sweep, write_summary, SweepConfig, SweepGrid, SweepRow, SweepSummary};
