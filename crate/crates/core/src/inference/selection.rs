use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{BcsError, Result};
use crate::model::Dataset;
use crate::priors::PriorSpec;
use crate::sampler::{ChainState, PosteriorDraws};

/// Decision cut on the inclusion probabilities.
pub const DEFAULT_CUT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    /// Threshold on `|beta_j / sigma|`.
    pub a: f64,
    /// Exponent of the threshold target `p^-(1+u)`.
    pub u: f64,
    pub t: f64,
    pub q: Vec<f64>,
    pub selected: Vec<usize>,
    pub sparsified_mean: Vec<f64>,
}

/// Threshold with prior tail mass `p^-(1+u)`.
pub fn threshold(prior: &PriorSpec, p: usize, u: f64) -> Result<f64> {
    prior.solve_threshold((p as f64).powf(-(1.0 + u)))
}

/// Fraction of draws with `|beta_j / sigma| > a`, each draw using its own `sigma`.
pub fn inclusion_probabilities(draws: &PosteriorDraws, a: f64) -> Vec<f64> {
    let mut counts = vec![0usize; draws.p()];
    for d in &draws.draws {
        let s = d.sigma2.sqrt();
        for (c, b) in counts.iter_mut().zip(d.beta.iter()) {
            if (b / s).abs() > a {
                *c += 1;
            }
        }
    }
    let kept = draws.kept() as f64;
    counts.into_iter().map(|c| c as f64 / kept).collect()
}

/// Selection at the default threshold target `1/p`.
pub fn select(draws: &PosteriorDraws, prior: &PriorSpec, t: f64) -> Result<SelectionReport> {
    select_with(draws, prior, t, 0.0)
}

pub fn select_with(
    draws: &PosteriorDraws,
    prior: &PriorSpec,
    t: f64,
    u: f64,
) -> Result<SelectionReport> {
    if draws.kept() == 0 {
        return Err(BcsError::InvalidParameter("no posterior draws".into()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(BcsError::InvalidParameter(format!(
            "cut t must lie in [0, 1], got {t}"
        )));
    }
    let a = threshold(prior, draws.p(), u)?;
    Ok(select_at(draws, a, t, u))
}

/// Selection at an explicit threshold `a`.
pub fn select_at(draws: &PosteriorDraws, a: f64, t: f64, u: f64) -> SelectionReport {
    let q = inclusion_probabilities(draws, a);
    let selected = (0..q.len()).filter(|&j| q[j] > t).collect();
    let mut sum = vec![0.0; draws.p()];
    for d in &draws.draws {
        let s = d.sigma2.sqrt();
        for (acc, &b) in sum.iter_mut().zip(d.beta.iter()) {
            if (b / s).abs() > a {
                *acc += b;
            }
        }
    }
    let kept = draws.kept() as f64;
    SelectionReport {
        a,
        u,
        t,
        q,
        selected,
        sparsified_mean: sum.into_iter().map(|v| v / kept).collect(),
    }
}

/// `n log(RSS/n) + |support| log n` of the draw sparsified at `a`.
pub fn bic_score(state: &ChainState, data: &Dataset, a: f64) -> f64 {
    let s = state.sigma2.sqrt();
    let mut resid: DVector<f64> = data.y.clone();
    let mut size = 0usize;
    for (j, &b) in state.beta.iter().enumerate() {
        if (b / s).abs() > a {
            resid.axpy(-b, &data.x.column(j), 1.0);
            size += 1;
        }
    }
    let n = data.n() as f64;
    let mse = (resid.norm_squared() / n).max(1e-300);
    n * mse.ln() + size as f64 * n.ln()
}

pub fn mean_bic(draws: &PosteriorDraws, data: &Dataset, a: f64) -> f64 {
    draws
        .draws
        .iter()
        .map(|d| bic_score(d, data, a))
        .sum::<f64>()
        / draws.kept() as f64
}
