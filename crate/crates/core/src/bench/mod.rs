//! Benchmark machinery: drifting environments, comparator sequences,
//! variation measures, bin partitioning and regret accounting.

mod env;
mod partition;
mod trace;
mod variation;

pub use env::{generate_environment, DriftKind, DriftProfile, Environment, EnvironmentConfig};
pub use partition::{partition_by_variation, Bin, Partition};
pub use trace::{
    dynamic_regret, interval_regret, penalized_regret, RegressionRecord, RegretTrace, TraceMetadata, TraceRow,
};
pub use variation::{functional_variation, functional_variation_probed, path_variation, probe_grid, ComparatorSequence};
