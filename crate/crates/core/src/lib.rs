//! Bayesian shrinkage regression for `p >> n`: polynomial-tailed and mixture
//! shrinkage priors, a blocked Gibbs sampler, sparsified-posterior selection,
//! posterior-mean BIC tuning and a simulation harness.

pub mod error;
pub mod experiments;
pub mod inference;
pub mod io_util;
pub mod manifest;
pub mod model;
pub mod priors;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use error::{BcsError, Result};
pub use inference::{IntervalReport, SelectionReport, TuningReport};
pub use model::{CovStructure, Dataset, DesignSpec, TrueModel};
pub use priors::{PriorFamily, PriorSpec, SigmaPrior};
pub use sampler::{BlockSize, ChainState, PosteriorDraws, SamplerConfig};
