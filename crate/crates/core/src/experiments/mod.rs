//! Simulation harness: the sparse toy problem and replicated scenarios with
//! persisted, hash-manifested results.

pub mod persist;
pub mod scenario;
pub mod toy;

pub use crate::inference::{oracle_ols, OracleFit};
pub use persist::{load, persist};
pub use scenario::{
    aggregate, run_replicate, run_scenario, Aggregate, MetricSummary, Preset, ReplicateRow,
    ScenarioResult, ScenarioSpec,
};
pub use toy::{persist_toy, run_toy, write_tuning, ToyOptions, ToyResult, TrueCoordinate};
