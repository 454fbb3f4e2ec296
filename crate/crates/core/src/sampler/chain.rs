use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BcsError, Result};
use crate::model::Dataset;
use crate::priors::{PriorSpec, SigmaPrior};
use crate::rng::{self, BcsRng, STREAM_CHAIN};
use crate::sampler::kernels::{self, draw_block, residual, sample_inverse_gamma, Block};
use crate::sampler::state::ChainState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockSize {
    /// `d = ceil((n p)^(1/3))`, the cost-minimizing order.
    Auto,
    Fixed(usize),
}

impl BlockSize {
    pub fn resolve(self, n: usize, p: usize) -> usize {
        let d = match self {
            BlockSize::Auto => ((n * p) as f64).cbrt().ceil() as usize,
            BlockSize::Fixed(d) => d,
        };
        d.clamp(1, p.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub burn_in: usize,
    pub iterations: usize,
    pub thin: usize,
    pub block_size: BlockSize,
    pub seed: u64,
    /// Re-partition a random permutation of the coordinates every sweep.
    #[serde(default)]
    pub permute_blocks: bool,
}

impl Default for SamplerConfig {
    /// Burn-in 5000, 40000 sweeps, every 40th kept.
    fn default() -> Self {
        Self {
            burn_in: 5000,
            iterations: 40_000,
            thin: 40,
            block_size: BlockSize::Auto,
            seed: 0,
            permute_blocks: false,
        }
    }
}

impl SamplerConfig {
    pub fn kept(&self) -> usize {
        self.iterations / self.thin.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.thin == 0 {
            return Err(BcsError::InvalidParameter(
                "iterations and thin must be at least 1".into(),
            ));
        }
        if let BlockSize::Fixed(0) = self.block_size {
            return Err(BcsError::InvalidParameter(
                "block size must be at least 1".into(),
            ));
        }
        if self.kept() == 0 {
            return Err(BcsError::InvalidParameter(format!(
                "thin {} exceeds iterations {}: no draw would be kept",
                self.thin, self.iterations
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawsMeta {
    pub sampler: SamplerConfig,
    pub prior: PriorSpec,
    pub sigma_prior: SigmaPrior,
    pub gamma: Option<f64>,
    pub kept: usize,
    pub block_size_used: usize,
    pub n: usize,
    pub p: usize,
}

/// Thinned post-burn-in Gibbs states.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    pub draws: Vec<ChainState>,
    pub meta: DrawsMeta,
}

impl PosteriorDraws {
    pub fn kept(&self) -> usize {
        self.draws.len()
    }

    pub fn p(&self) -> usize {
        self.meta.p
    }

    /// Post-burn-in sweep index of draw `k`.
    pub fn iteration(&self, k: usize) -> usize {
        (k + 1) * self.meta.sampler.thin
    }

    pub fn coordinate(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.draws.iter().map(move |d| d.beta[j])
    }

    pub fn posterior_mean(&self) -> DVector<f64> {
        let mut sum = DVector::zeros(self.p());
        for d in &self.draws {
            sum += &d.beta;
        }
        sum / self.kept() as f64
    }
}

/// One Gibbs transition of the hierarchy, with per-block design columns and
/// Gram matrices cached up front.
pub struct GibbsKernel<'a> {
    data: &'a Dataset,
    prior: PriorSpec,
    sigma_prior: SigmaPrior,
    block_size: usize,
    blocks: Vec<Block>,
    permute: bool,
}

impl<'a> GibbsKernel<'a> {
    pub fn new(
        data: &'a Dataset,
        prior: PriorSpec,
        sigma_prior: SigmaPrior,
        block_size: BlockSize,
        permute: bool,
    ) -> Result<Self> {
        prior.validate()?;
        sigma_prior.validate()?;
        if data.n() < 2 {
            return Err(BcsError::Dimension(format!(
                "sampling needs n >= 2, got n = {}",
                data.n()
            )));
        }
        let p = data.p();
        let d = block_size.resolve(data.n(), p);
        let blocks = if permute {
            Vec::new()
        } else {
            partition(&(0..p).collect::<Vec<_>>(), d)
                .into_iter()
                .map(|idx| Block::new(data, idx))
                .collect()
        };
        Ok(Self {
            data,
            prior,
            sigma_prior,
            block_size: d,
            blocks,
            permute,
        })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn initial_state(&self) -> ChainState {
        ChainState::initial(&self.prior, self.data.p(), self.data.response_variance())
    }

    /// Blockwise draw of all of `beta`; returns the residual `y - X beta`.
    pub fn beta_sweep<R: Rng + ?Sized>(
        &self,
        state: &mut ChainState,
        rng: &mut R,
    ) -> Result<DVector<f64>> {
        let precisions = state.prior_precisions(&self.prior);
        let mut resid = residual(self.data, &state.beta);
        if self.permute {
            let mut order: Vec<usize> = (0..self.data.p()).collect();
            order.shuffle(rng);
            for idx in partition(&order, self.block_size) {
                let block = Block::new(self.data, idx);
                draw_block(
                    &block,
                    &mut state.beta,
                    state.sigma2,
                    &precisions,
                    &mut resid,
                    rng,
                )?;
            }
        } else {
            for block in &self.blocks {
                draw_block(
                    block,
                    &mut state.beta,
                    state.sigma2,
                    &precisions,
                    &mut resid,
                    rng,
                )?;
            }
        }
        Ok(resid)
    }

    /// Latents, then `beta` block by block, then `sigma^2`.
    pub fn sweep<R: Rng + ?Sized>(&self, state: &mut ChainState, rng: &mut R) -> Result<()> {
        kernels::latent_update(state, &self.prior, rng);
        let resid = self.beta_sweep(state, rng)?;
        let shrink: f64 = state
            .beta
            .iter()
            .enumerate()
            .map(|(j, b)| b * b / (2.0 * state.prior_variance(&self.prior, j)))
            .sum();
        let (shape, rate) = kernels::sigma2_params(
            self.data.n(),
            self.data.p(),
            resid.norm_squared(),
            shrink,
            &self.sigma_prior,
        );
        state.sigma2 = sample_inverse_gamma(shape, rate, rng);
        Ok(())
    }
}

fn partition(order: &[usize], d: usize) -> Vec<Vec<usize>> {
    order.chunks(d.max(1)).map(<[usize]>::to_vec).collect()
}

fn diverged(sweep: usize, state: &ChainState) -> BcsError {
    let what = if !state.sigma2.is_finite() {
        format!("sigma2 = {}", state.sigma2)
    } else if let Some(j) = state.beta.iter().position(|b| !b.is_finite()) {
        format!("beta[{j}] = {}", state.beta[j])
    } else {
        "latent scale".to_string()
    };
    BcsError::ChainDiverged { sweep, what }
}

/// Runs one chain on stream `STREAM_CHAIN` of `config.seed`.
pub fn run_chain(
    data: &Dataset,
    prior: &PriorSpec,
    sp: &SigmaPrior,
    config: &SamplerConfig,
) -> Result<PosteriorDraws> {
    let mut rng = rng::stream(config.seed, STREAM_CHAIN);
    run_chain_with(data, prior, sp, config, &mut rng)
}

/// Runs `chains` independent chains on streams derived from `(seed, chain)`.
pub fn run_chains(
    data: &Dataset,
    prior: &PriorSpec,
    sp: &SigmaPrior,
    config: &SamplerConfig,
    chains: usize,
) -> Result<Vec<PosteriorDraws>> {
    (0..chains as u64)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(config.seed, STREAM_CHAIN + c);
            run_chain_with(data, prior, sp, config, &mut rng)
        })
        .collect()
}

fn run_chain_with(
    data: &Dataset,
    prior: &PriorSpec,
    sp: &SigmaPrior,
    config: &SamplerConfig,
    rng: &mut BcsRng,
) -> Result<PosteriorDraws> {
    config.validate()?;
    let kernel = GibbsKernel::new(data, *prior, *sp, config.block_size, config.permute_blocks)?;
    let mut state = kernel.initial_state();
    let mut draws = Vec::with_capacity(config.kept());
    let total = config.burn_in + config.iterations;
    for sweep in 1..=total {
        kernel.sweep(&mut state, rng)?;
        if !state.is_finite() || state.sigma2 <= 0.0 {
            return Err(diverged(sweep, &state));
        }
        if sweep > config.burn_in {
            let t = sweep - config.burn_in;
            if t.is_multiple_of(config.thin) && draws.len() < config.kept() {
                draws.push(state.clone());
            }
        }
    }
    Ok(PosteriorDraws {
        meta: DrawsMeta {
            sampler: *config,
            prior: *prior,
            sigma_prior: *sp,
            gamma: None,
            kept: draws.len(),
            block_size_used: kernel.block_size(),
            n: data.n(),
            p: data.p(),
        },
        draws,
    })
}
