use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BcsError, Result};
use crate::inference::{
    credible_intervals, evaluate_metrics, select, tune_gamma, Metrics, DEFAULT_CUT,
};
use crate::model::{generate_dataset, CovStructure, DesignSpec, TrueModel};
use crate::priors::{PriorFamily, PriorSpec, SigmaPrior};
use crate::rng::mix_seed;
use crate::sampler::{run_chain, write_draws, BlockSize, PosteriorDraws, SamplerConfig};

fn default_replicates() -> usize {
    20
}
fn default_alpha() -> f64 {
    0.05
}
fn default_cut() -> f64 {
    DEFAULT_CUT
}
fn default_grid() -> Vec<f64> {
    crate::inference::default_gamma_grid()
}

/// One simulation setting. `sampler.seed` is ignored: replicate `r` draws
/// its data from seed `base_seed + r` and derives its chain seeds from that.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    #[serde(default)]
    pub name: String,
    pub n: usize,
    pub p: usize,
    pub cov: CovStructure,
    #[serde(default)]
    pub intercept: bool,
    pub truth: TrueModel,
    pub family: PriorFamily,
    #[serde(default)]
    pub sigma_prior: SigmaPrior,
    #[serde(default = "default_grid")]
    pub gamma_grid: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    pub base_seed: u64,
    pub sampler: SamplerConfig,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_cut")]
    pub cut: f64,
    /// Also fit the Bayesian lasso at `lambda = sqrt(n log p)`.
    #[serde(default)]
    pub compare_lasso: bool,
}

/// Preset settings: `(n, p)` of 80 x 201 or 100 x 501 with independent or
/// equicorrelated (0.5) Gaussian covariates, an intercept column with true
/// value 0 and true coefficients (1, 1.5, 2) on the next three columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Table1,
    Table2,
    Table3,
    Table4,
}

impl std::str::FromStr for Preset {
    type Err = BcsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Preset::Table1),
            "table2" => Ok(Preset::Table2),
            "table3" => Ok(Preset::Table3),
            "table4" => Ok(Preset::Table4),
            other => Err(BcsError::InvalidParameter(format!(
                "unknown preset `{other}` (expected table1..table4)"
            ))),
        }
    }
}

impl ScenarioSpec {
    pub fn preset(preset: Preset, base_seed: u64) -> Self {
        let (n, p, cov) = match preset {
            Preset::Table1 => (80, 201, CovStructure::Independent),
            Preset::Table2 => (80, 201, CovStructure::EquiCorrelated { rho: 0.5 }),
            Preset::Table3 => (100, 501, CovStructure::Independent),
            Preset::Table4 => (100, 501, CovStructure::EquiCorrelated { rho: 0.5 }),
        };
        let mut beta = vec![0.0; p];
        beta[1..4].copy_from_slice(&[1.0, 1.5, 2.0]);
        let name = format!("{preset:?}").to_lowercase();
        ScenarioSpec {
            name,
            n,
            p,
            cov,
            intercept: true,
            truth: TrueModel {
                beta_star: beta,
                sigma_star: 1.0,
            },
            family: PriorFamily::StudentT { a1: 1.5 },
            sigma_prior: SigmaPrior::default(),
            gamma_grid: default_grid(),
            replicates: default_replicates(),
            base_seed,
            sampler: SamplerConfig::default(),
            alpha: default_alpha(),
            cut: default_cut(),
            compare_lasso: true,
        }
    }

    pub fn design(&self) -> DesignSpec {
        DesignSpec {
            n: self.n,
            p: self.p,
            cov: self.cov,
            intercept: self.intercept,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(BcsError::InvalidParameter(
                "replicates must be at least 1".into(),
            ));
        }
        if self.truth.beta_star.len() != self.p {
            return Err(BcsError::Dimension(format!(
                "truth has {} coefficients but p = {}",
                self.truth.beta_star.len(),
                self.p
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(BcsError::InvalidParameter(format!(
                "alpha = {}",
                self.alpha
            )));
        }
        self.cov.validate()?;
        self.sigma_prior.validate()?;
        self.sampler.validate()?;
        crate::inference::tuning::check_grid(&self.gamma_grid)
    }

    pub fn lasso_prior(&self) -> PriorSpec {
        PriorSpec::Laplace {
            lambda: (self.n as f64 * (self.p as f64).ln()).sqrt(),
        }
    }

    pub fn data_seed(&self, r: usize) -> u64 {
        self.base_seed.wrapping_add(r as u64)
    }
}

/// Outcome of one replicate; on failure only the seeds and the error are set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub replicate: usize,
    pub data_seed: u64,
    pub sampler_seed: u64,
    pub gamma_hat: Option<f64>,
    pub bcs: Option<Metrics>,
    pub lasso: Option<Metrics>,
    pub error: Option<String>,
}

impl ReplicateRow {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: String,
    pub mean: f64,
    /// `sd / sqrt(count)`; absent for a single value.
    pub se: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub metrics: Vec<MetricSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub replicates_ok: usize,
    pub replicates_failed: usize,
    pub methods: Vec<MethodSummary>,
}

impl Aggregate {
    pub fn metric(&self, method: &str, metric: &str) -> Option<&MetricSummary> {
        self.methods
            .iter()
            .find(|m| m.method == method)?
            .metrics
            .iter()
            .find(|s| s.metric == metric)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub spec: ScenarioSpec,
    pub rows: Vec<ReplicateRow>,
    pub aggregate: Aggregate,
}

fn summarize(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let se = (values.len() > 1).then(|| crate::stats::sd(values) / n.sqrt());
    (mean, se)
}

/// Mean and standard error of every metric over the successful replicates,
/// accumulated in replicate order.
pub fn aggregate(rows: &[ReplicateRow]) -> Aggregate {
    let ok: Vec<&ReplicateRow> = rows.iter().filter(|r| r.ok()).collect();
    let mut methods = Vec::new();
    let bcs: Vec<Metrics> = ok.iter().filter_map(|r| r.bcs.clone()).collect();
    let lasso: Vec<Metrics> = ok.iter().filter_map(|r| r.lasso.clone()).collect();
    for (name, per_rep) in [("bcs", bcs), ("lasso", lasso)] {
        if per_rep.is_empty() {
            continue;
        }
        let metrics = Metrics::NAMES
            .iter()
            .enumerate()
            .filter_map(|(k, metric)| {
                let values: Vec<f64> = per_rep.iter().filter_map(|m| m.values()[k]).collect();
                if values.is_empty() {
                    return None;
                }
                let (mean, se) = summarize(&values);
                Some(MetricSummary {
                    metric: metric.to_string(),
                    mean,
                    se,
                    count: values.len(),
                })
            })
            .collect();
        methods.push(MethodSummary {
            method: name.to_string(),
            metrics,
        });
    }
    Aggregate {
        replicates_ok: ok.len(),
        replicates_failed: rows.len() - ok.len(),
        methods,
    }
}

/// Draws kept from one replicate when chain dumps are requested.
pub struct ReplicateChains {
    pub bcs: PosteriorDraws,
    pub lasso: Option<PosteriorDraws>,
}

fn fit_and_score(
    spec: &ScenarioSpec,
    prior: &PriorSpec,
    draws: &PosteriorDraws,
) -> Result<Metrics> {
    let selection = select(draws, prior, spec.cut)?;
    let intervals = credible_intervals(draws, spec.alpha)?;
    evaluate_metrics(&selection, &intervals, draws, &spec.truth)
}

/// Runs replicate `r` of `spec`. It depends only on `spec` and `base_seed + r`.
pub fn run_replicate(spec: &ScenarioSpec, r: usize) -> (ReplicateRow, Option<ReplicateChains>) {
    let data_seed = spec.data_seed(r);
    let sampler_seed = mix_seed(data_seed);
    let mut row = ReplicateRow {
        replicate: r,
        data_seed,
        sampler_seed,
        gamma_hat: None,
        bcs: None,
        lasso: None,
        error: None,
    };
    let outcome = (|| -> Result<(f64, Metrics, Option<Metrics>, ReplicateChains)> {
        let data = generate_dataset(&spec.design(), &spec.truth, data_seed)?;
        let cfg = SamplerConfig {
            seed: sampler_seed,
            ..spec.sampler
        };
        let tuned = tune_gamma(
            &data,
            &spec.family,
            &spec.sigma_prior,
            &spec.gamma_grid,
            &cfg,
        )?;
        let bcs = fit_and_score(spec, &tuned.prior, &tuned.draws)?;
        let (lasso, lasso_draws) = if spec.compare_lasso {
            let prior = spec.lasso_prior();
            let lcfg = SamplerConfig {
                seed: sampler_seed.wrapping_add(spec.gamma_grid.len() as u64),
                block_size: BlockSize::Auto,
                ..spec.sampler
            };
            let draws = run_chain(&data, &prior, &spec.sigma_prior, &lcfg)?;
            (Some(fit_and_score(spec, &prior, &draws)?), Some(draws))
        } else {
            (None, None)
        };
        Ok((
            tuned.report.gamma_hat,
            bcs,
            lasso,
            ReplicateChains {
                bcs: tuned.draws,
                lasso: lasso_draws,
            },
        ))
    })();
    match outcome {
        Ok((gamma_hat, bcs, lasso, chains)) => {
            row.gamma_hat = Some(gamma_hat);
            row.bcs = Some(bcs);
            row.lasso = lasso;
            (row, Some(chains))
        }
        Err(e) => {
            log::error!("replicate {r} failed: {e}");
            row.error = Some(e.to_string());
            (row, None)
        }
    }
}

/// Runs every replicate, in parallel, and aggregates. Chains are dumped under
/// `chains_dir/rep_<r>/{bcs,lasso}` when a directory is given.
pub fn run_scenario(spec: &ScenarioSpec, chains_dir: Option<&Path>) -> Result<ScenarioResult> {
    spec.validate()?;
    let results: Vec<Result<ReplicateRow>> = (0..spec.replicates)
        .into_par_iter()
        .map(|r| {
            let (row, chains) = run_replicate(spec, r);
            if let (Some(dir), Some(ch)) = (chains_dir, chains) {
                let rep = dir.join(format!("rep_{r:04}"));
                write_draws(&rep.join("bcs"), &ch.bcs, false)?;
                if let Some(l) = &ch.lasso {
                    write_draws(&rep.join("lasso"), l, false)?;
                }
            }
            log::info!("replicate {r}: {}", if row.ok() { "ok" } else { "failed" });
            Ok(row)
        })
        .collect();
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    let aggregate = aggregate(&rows);
    Ok(ScenarioResult {
        spec: spec.clone(),
        rows,
        aggregate,
    })
}
