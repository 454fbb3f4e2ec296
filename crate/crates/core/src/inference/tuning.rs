use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BcsError, Result};
use crate::inference::selection::{mean_bic, threshold};
use crate::model::Dataset;
use crate::priors::{PriorFamily, PriorSpec, SigmaPrior};
use crate::sampler::{run_chain, PosteriorDraws, SamplerConfig};

/// `-0.25, -0.20, ..., 1.10`.
pub fn default_gamma_grid() -> Vec<f64> {
    (0..28).map(|k| (-25 + 5 * k) as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFailure {
    pub gamma: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningReport {
    pub gammas: Vec<f64>,
    /// `None` where the chain at that grid point failed.
    pub mean_bic: Vec<Option<f64>>,
    pub gamma_hat: f64,
    pub per_gamma_seeds: Vec<u64>,
    pub failures: Vec<GridFailure>,
}

impl TuningReport {
    pub fn index_hat(&self) -> usize {
        self.gammas
            .iter()
            .position(|&g| g == self.gamma_hat)
            .expect("gamma_hat is a grid point")
    }
}

/// The tuning report together with the chain already run at `gamma_hat`.
#[derive(Debug, Clone)]
pub struct Tuned {
    pub report: TuningReport,
    pub prior: PriorSpec,
    pub draws: PosteriorDraws,
}

pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(BcsError::InvalidParameter("gamma grid is empty".into()));
    }
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(BcsError::InvalidParameter(
            "gamma grid has non-finite points".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BcsError::InvalidParameter(
            "gamma grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

#[derive(Clone)]
struct Best {
    bic: f64,
    idx: usize,
    prior: PriorSpec,
    draws: PosteriorDraws,
}

fn better(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if (y.bic, y.idx) < (x.bic, x.idx) {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

/// Per-grid-point BIC outcomes and the best chain seen so far.
type Partial = (Vec<(usize, Result<f64, String>)>, Option<Best>);

/// Runs one chain per grid point and picks the minimizer of the posterior
/// mean BIC, ties going to the smaller `gamma`.
///
/// Grid point `k` uses seed `config.seed + k`; the result does not depend on
/// how the grid is scheduled across threads.
pub fn tune_gamma(
    data: &Dataset,
    family: &PriorFamily,
    sp: &SigmaPrior,
    grid: &[f64],
    config: &SamplerConfig,
) -> Result<Tuned> {
    tune_gamma_with(data, family, sp, grid, config, true)
}

/// [`tune_gamma`] with an explicit choice of parallel or sequential grid.
pub fn tune_gamma_with(
    data: &Dataset,
    family: &PriorFamily,
    sp: &SigmaPrior,
    grid: &[f64],
    config: &SamplerConfig,
    parallel: bool,
) -> Result<Tuned> {
    check_grid(grid)?;
    let (n, p) = (data.n(), data.p());
    let seeds: Vec<u64> = (0..grid.len() as u64)
        .map(|k| config.seed.wrapping_add(k))
        .collect();

    let eval = |k: usize| -> Partial {
        let gamma = grid[k];
        let prior = family.at_gamma(n, p, gamma);
        let cfg = SamplerConfig {
            seed: seeds[k],
            ..*config
        };
        let outcome = threshold(&prior, p, 0.0).and_then(|a| {
            let mut draws = run_chain(data, &prior, sp, &cfg)?;
            draws.meta.gamma = Some(gamma);
            Ok((mean_bic(&draws, data, a), draws))
        });
        match outcome {
            Ok((bic, draws)) if bic.is_finite() => (
                vec![(k, Ok(bic))],
                Some(Best {
                    bic,
                    idx: k,
                    prior,
                    draws,
                }),
            ),
            Ok((bic, _)) => (vec![(k, Err(format!("mean BIC is {bic}")))], None),
            Err(e) => {
                log::warn!("gamma = {gamma}: {e}");
                (vec![(k, Err(e.to_string()))], None)
            }
        }
    };
    let merge = |mut a: Partial, b: Partial| {
        a.0.extend(b.0);
        (a.0, better(a.1, b.1))
    };
    let (mut rows, best) = if parallel {
        (0..grid.len())
            .into_par_iter()
            .map(eval)
            .reduce(|| (Vec::new(), None), merge)
    } else {
        (0..grid.len()).map(eval).fold((Vec::new(), None), merge)
    };
    rows.sort_by_key(|(k, _)| *k);

    let mut mean = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (k, r) in rows {
        match r {
            Ok(v) => mean.push(Some(v)),
            Err(error) => {
                mean.push(None);
                failures.push(GridFailure {
                    gamma: grid[k],
                    error,
                });
            }
        }
    }
    let best = best.ok_or(BcsError::AllGridPointsFailed(grid.len()))?;
    Ok(Tuned {
        report: TuningReport {
            gammas: grid.to_vec(),
            mean_bic: mean,
            gamma_hat: grid[best.idx],
            per_gamma_seeds: seeds,
            failures,
        },
        prior: best.prior,
        draws: best.draws,
    })
}
