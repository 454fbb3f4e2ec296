//! Blocked Gibbs sampler for the scale-mixture hierarchy.

pub mod chain;
pub mod dump;
pub mod kernels;
pub mod state;
pub mod timing;

pub use chain::{
    run_chain, run_chains, BlockSize, DrawsMeta, GibbsKernel, PosteriorDraws, SamplerConfig,
};
pub use dump::{read_draws, write_draws};
pub use state::{ChainState, Latent};
