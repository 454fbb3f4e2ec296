//! Conjugate full conditionals of the scale-mixture hierarchy
//!
//! ```text
//! sigma^2 | beta, l2      ~ IG(a0 + (n+p)/2, b0 + |y - X beta|^2/2 + sum beta_j^2/(2 l2_j))
//! beta    | sigma^2, l2   ~ N(K^-1 X'y / sigma^2, K^-1),  K = (X'X + diag(1/l2)) / sigma^2
//! l2_j    | beta, sigma^2 ∝ l2_j^-1/2 exp(-beta_j^2 / (2 l2_j sigma^2)) pi(l2_j)
//! ```

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{BcsError, Result};
use crate::model::Dataset;
use crate::priors::{PriorSpec, SigmaPrior};
use crate::sampler::state::{ChainState, Latent};

/// Smallest `|beta_j|` fed to the inverse-Gaussian mean of the Laplace update.
pub const LAPLACE_BETA_FLOOR: f64 = 1e-12;

pub fn residual(data: &Dataset, beta: &DVector<f64>) -> DVector<f64> {
    &data.y - &data.x * beta
}

fn check_dims(state: &ChainState, data: &Dataset) -> Result<()> {
    if state.p() != data.p() {
        return Err(BcsError::Dimension(format!(
            "state has {} coefficients, data has {} columns",
            state.p(),
            data.p()
        )));
    }
    Ok(())
}

/// `sum_j beta_j^2 / (2 l2_j)`.
fn shrinkage_term(state: &ChainState, prior: &PriorSpec) -> f64 {
    state
        .beta
        .iter()
        .enumerate()
        .map(|(j, b)| b * b / (2.0 * state.prior_variance(prior, j)))
        .sum()
}

/// Inverse-gamma `(shape, rate)` of `sigma^2` given everything else.
pub fn sigma2_full_conditional(
    state: &ChainState,
    data: &Dataset,
    prior: &PriorSpec,
    sp: &SigmaPrior,
) -> Result<(f64, f64)> {
    check_dims(state, data)?;
    let rss = residual(data, &state.beta).norm_squared();
    Ok(sigma2_params(
        data.n(),
        data.p(),
        rss,
        shrinkage_term(state, prior),
        sp,
    ))
}

pub(crate) fn sigma2_params(
    n: usize,
    p: usize,
    rss: f64,
    shrink: f64,
    sp: &SigmaPrior,
) -> (f64, f64) {
    (sp.a0 + (n + p) as f64 / 2.0, sp.b0 + rss / 2.0 + shrink)
}

/// Mean and precision `K` of `beta` given `(sigma^2, latents)`.
pub fn beta_full_conditional(
    state: &ChainState,
    data: &Dataset,
    prior: &PriorSpec,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_dims(state, data)?;
    let mut a = data.x.tr_mul(&data.x);
    for (j, prec) in state.prior_precisions(prior).into_iter().enumerate() {
        a[(j, j)] += prec;
    }
    let rhs = data.x.tr_mul(&data.y);
    let chol = Cholesky::new(a.clone()).ok_or(BcsError::Cholesky { start: 0 })?;
    Ok((chol.solve(&rhs), a / state.sigma2))
}

/// Mean and covariance of `beta_B | beta_{-B}`:
/// `N((X_B'X_B + L_B)^-1 X_B'(y - X_{-B} beta_{-B}), sigma^2 (X_B'X_B + L_B)^-1)`.
pub fn block_conditional(
    state: &ChainState,
    data: &Dataset,
    prior: &PriorSpec,
    block: &[usize],
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_dims(state, data)?;
    validate_block(block, data.p())?;
    let xb = data.x.select_columns(block);
    let mut partial = residual(data, &state.beta);
    for (k, &j) in block.iter().enumerate() {
        partial.axpy(state.beta[j], &xb.column(k), 1.0);
    }
    let mut a = xb.tr_mul(&xb);
    for (k, &j) in block.iter().enumerate() {
        a[(k, k)] += 1.0 / state.prior_variance(prior, j);
    }
    let chol = Cholesky::new(a).ok_or(BcsError::Cholesky { start: block[0] })?;
    let mean = chol.solve(&xb.tr_mul(&partial));
    Ok((mean, chol.inverse() * state.sigma2))
}

fn validate_block(block: &[usize], p: usize) -> Result<()> {
    if block.is_empty() {
        return Err(BcsError::InvalidParameter("empty coefficient block".into()));
    }
    if let Some(&j) = block.iter().find(|&&j| j >= p) {
        return Err(BcsError::Dimension(format!(
            "block index {j} out of range for p = {p}"
        )));
    }
    Ok(())
}

/// A coefficient block with its design columns and Gram matrix cached.
#[derive(Debug, Clone)]
pub struct Block {
    pub idx: Vec<usize>,
    pub xb: DMatrix<f64>,
    pub gram: DMatrix<f64>,
}

impl Block {
    pub fn new(data: &Dataset, idx: Vec<usize>) -> Self {
        let xb = data.x.select_columns(&idx);
        let gram = xb.tr_mul(&xb);
        Self { idx, xb, gram }
    }
}

/// Draws `beta_B` from its block conditional and writes it into `beta`.
///
/// `resid` must hold `y - X beta` on entry and holds it again on exit.
/// `precisions` are the prior precisions `1/l2_j` of every coordinate.
pub(crate) fn draw_block<R: Rng + ?Sized>(
    block: &Block,
    beta: &mut DVector<f64>,
    sigma2: f64,
    precisions: &[f64],
    resid: &mut DVector<f64>,
    rng: &mut R,
) -> Result<()> {
    let d = block.idx.len();
    let old = DVector::from_iterator(d, block.idx.iter().map(|&j| beta[j]));
    resid.gemv(1.0, &block.xb, &old, 1.0);

    let mut a = block.gram.clone();
    for (k, &j) in block.idx.iter().enumerate() {
        a[(k, k)] += precisions[j];
    }
    let chol = Cholesky::<f64, Dyn>::new(a).ok_or(BcsError::Cholesky {
        start: block.idx[0],
    })?;
    let l = chol.l_dirty();

    // beta_B = L^-T (L^-1 X_B' r + sigma z), so that the mean is A^-1 X_B' r
    // and the covariance is sigma^2 A^-1 with A = L L'.
    let mut w = block.xb.tr_mul(resid);
    l.solve_lower_triangular_mut(&mut w);
    let sigma = sigma2.sqrt();
    for wk in w.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *wk += sigma * z;
    }
    l.tr_solve_lower_triangular_mut(&mut w);

    resid.gemv(-1.0, &block.xb, &w, 1.0);
    for (k, &j) in block.idx.iter().enumerate() {
        beta[j] = w[k];
    }
    Ok(())
}

/// Blockwise Gibbs step for one arbitrary block of coordinates.
pub fn beta_block_update<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &Dataset,
    prior: &PriorSpec,
    block: &[usize],
    rng: &mut R,
) -> Result<()> {
    check_dims(state, data)?;
    validate_block(block, data.p())?;
    let blk = Block::new(data, block.to_vec());
    let precisions = state.prior_precisions(prior);
    let mut resid = residual(data, &state.beta);
    draw_block(
        &blk,
        &mut state.beta,
        state.sigma2,
        &precisions,
        &mut resid,
        rng,
    )
}

/// `IG(shape, rate)` draw as `rate / Gamma(shape, 1)`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> f64 {
    let g = Gamma::new(shape, 1.0).expect("positive inverse-gamma shape");
    rate / g.sample(rng)
}

/// Inverse-Gaussian draw (Michael, Schucany and Haas), with the smaller
/// root written in a cancellation-free form so that very large means
/// degrade gracefully to the Lévy limit `shape / chi2_1`.
pub fn sample_inverse_gaussian<R: Rng + ?Sized>(mean: f64, shape: f64, rng: &mut R) -> f64 {
    let nu: f64 = rng.sample(StandardNormal);
    let w = mean * nu * nu / (2.0 * shape);
    let x1 = mean / (1.0 + w + (w * w + 2.0 * w).sqrt());
    let u: f64 = rng.random();
    if u * (mean + x1) <= mean {
        x1
    } else {
        mean * mean / x1
    }
}

/// `l2_j ~ IG(a1 + 1/2, s_n + beta_j^2 / (2 sigma^2))` for every `j`.
pub fn latent_update_student_t<R: Rng + ?Sized>(
    state: &mut ChainState,
    a1: f64,
    s_n: f64,
    rng: &mut R,
) {
    let gamma = Gamma::new(a1 + 0.5, 1.0).expect("positive shape");
    let inv_two_sigma2 = 0.5 / state.sigma2;
    let beta = &state.beta;
    let Latent::Scales(l2) = &mut state.latent else {
        panic!("student-t update needs a scale latent block");
    };
    for (l, b) in l2.iter_mut().zip(beta.iter()) {
        *l = (s_n + b * b * inv_two_sigma2) / gamma.sample(rng);
    }
}

/// `1/l2_j ~ InverseGaussian(sqrt(lambda^2 sigma^2 / beta_j^2), lambda^2)`.
pub fn latent_update_laplace<R: Rng + ?Sized>(state: &mut ChainState, lambda: f64, rng: &mut R) {
    let shape = lambda * lambda;
    let scale = lambda * state.sigma2.sqrt();
    let beta = &state.beta;
    let Latent::Scales(l2) = &mut state.latent else {
        panic!("laplace update needs a scale latent block");
    };
    for (l, b) in l2.iter_mut().zip(beta.iter()) {
        let mean = scale / b.abs().max(LAPLACE_BETA_FLOOR);
        *l = 1.0 / sample_inverse_gaussian(mean, shape, rng);
    }
}

/// Posterior slab probability of one coordinate, computed in log space.
pub fn slab_probability(x: f64, m1: f64, sigma0: f64, sigma1: f64) -> f64 {
    let log_slab = m1.ln() - sigma1.ln() - 0.5 * (x / sigma1).powi(2);
    let log_spike = (1.0 - m1).ln() - sigma0.ln() - 0.5 * (x / sigma0).powi(2);
    if log_spike == f64::NEG_INFINITY {
        return 1.0;
    }
    if log_slab == f64::NEG_INFINITY {
        return 0.0;
    }
    1.0 / (1.0 + (log_spike - log_slab).exp())
}

/// `xi_j ~ Bernoulli(w_j)` with `w_j` the slab responsibility of `beta_j / sigma`.
pub fn latent_update_mixture<R: Rng + ?Sized>(
    state: &mut ChainState,
    m1: f64,
    sigma0: f64,
    sigma1: f64,
    rng: &mut R,
) {
    let sigma = state.sigma2.sqrt();
    let beta = &state.beta;
    let Latent::Indicators(z) = &mut state.latent else {
        panic!("mixture update needs an indicator latent block");
    };
    for (zj, b) in z.iter_mut().zip(beta.iter()) {
        let w = slab_probability(b / sigma, m1, sigma0, sigma1);
        let u: f64 = rng.random();
        *zj = u < w;
    }
}

pub fn latent_update<R: Rng + ?Sized>(state: &mut ChainState, prior: &PriorSpec, rng: &mut R) {
    match *prior {
        PriorSpec::StudentT { a1, s_n } => latent_update_student_t(state, a1, s_n, rng),
        PriorSpec::Laplace { lambda } => latent_update_laplace(state, lambda, rng),
        PriorSpec::MixtureGaussian { m1, sigma0, sigma1 } => {
            latent_update_mixture(state, m1, sigma0, sigma1, rng)
        }
    }
}

/// Log posterior of `(beta, sigma^2)` up to an additive constant:
/// `sum log g(beta_j/sigma) - (n/2 + p/2 + a0 + 1) log sigma^2 - (2 b0 + RSS) / (2 sigma^2)`.
pub fn log_posterior(
    state: &ChainState,
    data: &Dataset,
    prior: &PriorSpec,
    sp: &SigmaPrior,
) -> Result<f64> {
    check_dims(state, data)?;
    let sigma = state.sigma2.sqrt();
    let log_prior: f64 = state
        .beta
        .iter()
        .map(|b| prior.log_density(b / sigma))
        .sum();
    let rss = residual(data, &state.beta).norm_squared();
    let (n, p) = (data.n() as f64, data.p() as f64);
    Ok(log_prior
        - (n / 2.0 + p / 2.0 + sp.a0 + 1.0) * state.sigma2.ln()
        - (2.0 * sp.b0 + rss) / (2.0 * state.sigma2))
}
