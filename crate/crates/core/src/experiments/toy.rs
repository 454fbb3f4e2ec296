use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::inference::{
    bvm_diagnostics, default_gamma_grid, oracle_ols, select, tune_gamma, BvmReport, OracleFit,
    SelectionReport, TuningReport, DEFAULT_CUT,
};
use crate::io_util::{ensure_dir, fmt_f64, write_json};
use crate::manifest::{write_manifest, Manifest};
use crate::model::{generate_dataset, CovStructure, Dataset, DesignSpec, TrueModel};
use crate::priors::{PriorFamily, PriorSpec, SigmaPrior};
use crate::rng::mix_seed;
use crate::sampler::{run_chain, write_draws, PosteriorDraws, SamplerConfig};
use crate::stats::{mean, nearest_rank};

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyOptions {
    pub n: usize,
    pub p: usize,
    /// Number of leading unit coefficients.
    pub s: usize,
    pub seed: u64,
    pub a1: f64,
    pub sigma_prior: SigmaPrior,
    pub gamma_grid: Vec<f64>,
    pub sampler: SamplerConfig,
    pub lasso: bool,
}

impl Default for ToyOptions {
    /// `n = 120`, `p = 200`, four unit coefficients, t prior with 3 degrees
    /// of freedom, the full grid and the long sampler protocol.
    fn default() -> Self {
        Self {
            n: 120,
            p: 200,
            s: 4,
            seed: 0,
            a1: 1.5,
            sigma_prior: SigmaPrior::default(),
            gamma_grid: default_gamma_grid(),
            sampler: SamplerConfig::default(),
            lasso: true,
        }
    }
}

impl ToyOptions {
    pub fn truth(&self) -> TrueModel {
        let mut beta = vec![0.0; self.p];
        beta[..self.s.min(self.p)].fill(1.0);
        TrueModel {
            beta_star: beta,
            sigma_star: 1.0,
        }
    }

    pub fn design(&self) -> DesignSpec {
        DesignSpec {
            n: self.n,
            p: self.p,
            cov: CovStructure::Independent,
            intercept: false,
        }
    }

    pub fn lasso_prior(&self) -> PriorSpec {
        PriorSpec::Laplace {
            lambda: (self.n as f64 * (self.p as f64).ln()).sqrt(),
        }
    }
}

/// Posterior and oracle summaries of one true coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueCoordinate {
    pub index: usize,
    pub oracle_lower: f64,
    pub oracle_upper: f64,
    pub posterior_mean: f64,
    pub posterior_median: f64,
    /// Share of the draws inside the oracle 99% interval.
    pub fraction_inside: f64,
    pub lasso_mean: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ToyResult {
    pub options: ToyOptions,
    pub data: Dataset,
    pub truth: TrueModel,
    pub tuning: TuningReport,
    pub prior: PriorSpec,
    pub draws: PosteriorDraws,
    pub selection: SelectionReport,
    pub oracle: OracleFit,
    pub true_coordinates: Vec<TrueCoordinate>,
    pub bvm: BvmReport,
    pub lasso: Option<PosteriorDraws>,
}

impl ToyResult {
    pub fn mean_bic_at(&self, gamma: f64) -> Option<f64> {
        let k = self
            .tuning
            .gammas
            .iter()
            .position(|g| (g - gamma).abs() < 1e-9)?;
        self.tuning.mean_bic[k]
    }
}

fn sorted(xs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = xs.collect();
    v.sort_by(f64::total_cmp);
    v
}

/// BIC tuning of the t prior on the sparse toy problem, with the Bayesian
/// lasso at `lambda = sqrt(n log p)` alongside.
pub fn run_toy(opts: &ToyOptions) -> Result<ToyResult> {
    let truth = opts.truth();
    let data = generate_dataset(&opts.design(), &truth, opts.seed)?;
    let chain_seed = mix_seed(opts.seed);
    let cfg = SamplerConfig {
        seed: chain_seed,
        ..opts.sampler
    };
    let family = PriorFamily::StudentT { a1: opts.a1 };
    let tuned = tune_gamma(&data, &family, &opts.sigma_prior, &opts.gamma_grid, &cfg)?;
    log::info!("toy: gamma_hat = {}", tuned.report.gamma_hat);
    let selection = select(&tuned.draws, &tuned.prior, DEFAULT_CUT)?;
    let support = truth.support();
    let oracle = oracle_ols(&data, &support)?;
    let bvm = bvm_diagnostics(&tuned.draws, &data, &truth)?;

    let lasso = if opts.lasso {
        let lcfg = SamplerConfig {
            seed: chain_seed.wrapping_add(opts.gamma_grid.len() as u64),
            ..opts.sampler
        };
        Some(run_chain(
            &data,
            &opts.lasso_prior(),
            &opts.sigma_prior,
            &lcfg,
        )?)
    } else {
        None
    };

    let true_coordinates = support
        .iter()
        .enumerate()
        .map(|(k, &j)| {
            let half = Z99 * oracle.sd(k);
            let (lo, hi) = (oracle.beta_hat[k] - half, oracle.beta_hat[k] + half);
            let xs = sorted(tuned.draws.coordinate(j));
            let inside = xs.iter().filter(|&&b| lo <= b && b <= hi).count();
            TrueCoordinate {
                index: j,
                oracle_lower: lo,
                oracle_upper: hi,
                posterior_mean: mean(&xs),
                posterior_median: nearest_rank(&xs, 0.5),
                fraction_inside: inside as f64 / xs.len() as f64,
                lasso_mean: lasso
                    .as_ref()
                    .map(|l| mean(&l.coordinate(j).collect::<Vec<_>>())),
            }
        })
        .collect();

    Ok(ToyResult {
        options: opts.clone(),
        data,
        truth,
        tuning: tuned.report,
        prior: tuned.prior,
        draws: tuned.draws,
        selection,
        oracle,
        true_coordinates,
        bvm,
        lasso,
    })
}

/// Per-coordinate five-number summaries for box plots of the first `k`
/// coordinates.
fn write_boxplot(path: &Path, runs: &[(&str, &PosteriorDraws)], k: usize) -> Result<()> {
    use crate::error::BcsError;
    let mut w = csv::Writer::from_path(path).map_err(|e| BcsError::csv(path, e))?;
    w.write_record(["method", "coordinate", "min", "q1", "median", "q3", "max"])
        .map_err(|e| BcsError::csv(path, e))?;
    for (method, draws) in runs {
        for j in 0..k.min(draws.p()) {
            let xs = sorted(draws.coordinate(j));
            let mut rec = vec![method.to_string(), j.to_string()];
            rec.extend(
                [0.0, 0.25, 0.5, 0.75, 1.0]
                    .iter()
                    .map(|&q| fmt_f64(nearest_rank(&xs, q))),
            );
            w.write_record(&rec).map_err(|e| BcsError::csv(path, e))?;
        }
    }
    w.flush().map_err(|e| BcsError::io(path, e))
}

fn write_bic(path: &Path, t: &TuningReport) -> Result<()> {
    use crate::error::BcsError;
    let mut w = csv::Writer::from_path(path).map_err(|e| BcsError::csv(path, e))?;
    w.write_record(["gamma", "mean_bic"])
        .map_err(|e| BcsError::csv(path, e))?;
    for (g, b) in t.gammas.iter().zip(&t.mean_bic) {
        w.write_record([fmt_f64(*g), b.map(fmt_f64).unwrap_or_default()])
            .map_err(|e| BcsError::csv(path, e))?;
    }
    w.flush().map_err(|e| BcsError::io(path, e))
}

/// Writes a tuning report as JSON plus the `gamma,mean_bic` CSV.
pub fn write_tuning(dir: &Path, t: &TuningReport) -> Result<Vec<String>> {
    write_json(&dir.join("tuning.json"), t)?;
    write_bic(&dir.join("bic.csv"), t)?;
    Ok(vec!["tuning.json".into(), "bic.csv".into()])
}

#[derive(Serialize)]
struct ToySummary<'a> {
    options: &'a ToyOptions,
    truth: &'a TrueModel,
    gamma_hat: f64,
    prior: &'a PriorSpec,
    lasso_prior: Option<PriorSpec>,
    selected: &'a [usize],
    true_coordinates: &'a [TrueCoordinate],
}

/// Writes every toy artifact into `dir` and returns the manifest.
pub fn persist_toy(res: &ToyResult, dir: &Path, config: serde_json::Value) -> Result<Manifest> {
    ensure_dir(dir)?;
    let mut files = write_tuning(dir, &res.tuning)?;
    let summary = ToySummary {
        options: &res.options,
        truth: &res.truth,
        gamma_hat: res.tuning.gamma_hat,
        prior: &res.prior,
        lasso_prior: res.lasso.as_ref().map(|_| res.options.lasso_prior()),
        selected: &res.selection.selected,
        true_coordinates: &res.true_coordinates,
    };
    for (name, value) in [
        ("summary.json", serde_json::to_value(&summary)),
        ("selection.json", serde_json::to_value(&res.selection)),
        ("oracle.json", serde_json::to_value(&res.oracle)),
        ("bvm.json", serde_json::to_value(&res.bvm)),
    ] {
        let value = value.map_err(|e| crate::error::BcsError::json(dir.join(name), e))?;
        write_json(&dir.join(name), &value)?;
        files.push(name.into());
    }
    write_draws(&dir.join("bcs"), &res.draws, false)?;
    files.extend(["bcs/chain.csv".into(), "bcs/chain.meta.json".into()]);
    let mut runs = vec![("bcs", &res.draws)];
    if let Some(l) = &res.lasso {
        write_draws(&dir.join("lasso"), l, false)?;
        files.extend(["lasso/chain.csv".into(), "lasso/chain.meta.json".into()]);
        runs.push(("lasso", l));
    }
    write_boxplot(&dir.join("boxplot.csv"), &runs, 50)?;
    files.push("boxplot.csv".into());
    write_manifest(dir, &files, config)
}
