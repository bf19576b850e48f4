//! Randomized Pauli measurements and classical-shadow estimation.

mod budget;
mod derandomize;
mod estimate;
mod snapshot;

pub use budget::{snapshot_budget, snapshot_budget_for_log, BUDGET_CONSTANT};
pub use derandomize::{
    derandomized_schedule, derandomized_schedule_with, estimate_derandomized, BasisAssignment,
    DerandomizationConfig,
};
pub use estimate::{estimate_pauli, failure_proportion, single_snapshot_term, EstimateReport};
pub use snapshot::{
    derive_seed, measure_in_bases, sample_snapshot, sample_snapshots, snapshot_rng, Scratch, ShadowEnsemble, Snapshot,
    StateSource, MAX_SNAPSHOT_SITES,
};
