//! Inference on posterior draws: sparsified selection, credible intervals,
//! posterior-mean BIC tuning and normal-limit diagnostics.

pub mod bvm;
pub mod intervals;
pub mod metrics;
pub mod selection;
pub mod tuning;

pub use bvm::{bvm_diagnostics, oracle_intervals, oracle_ols, BvmReport, OracleFit};
pub use intervals::{credible_intervals, Interval, IntervalReport};
pub use metrics::{evaluate_metrics, Metrics};
pub use selection::{
    bic_score, inclusion_probabilities, mean_bic, select, select_with, threshold, SelectionReport,
    DEFAULT_CUT,
};
pub use tuning::{default_gamma_grid, tune_gamma, tune_gamma_with, Tuned, TuningReport};
