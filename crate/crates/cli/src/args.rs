use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "bcs",
    version,
    about = "Bayesian shrinkage regression: Gibbs sampling, selection, tuning and simulation"
)]
pub struct Cli {
    /// Master seed; every random draw of the run derives from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Log more to standard error (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// JSON object of flag defaults, e.g. {"burn-in": 1000}; flags given on
    /// the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Simulate a Gaussian-design dataset with known truth.
    Generate(GenerateArgs),
    /// Run one Gibbs chain and dump it.
    Fit(FitArgs),
    /// Pick gamma by posterior-mean BIC over a grid.
    Tune(TuneArgs),
    /// Sparsified-posterior variable selection from a chain dump.
    Select(SelectArgs),
    /// Equal-tailed credible intervals from a chain dump.
    Intervals(IntervalsArgs),
    /// Normal-limit diagnostics against the oracle least-squares fit.
    Bvm(BvmArgs),
    /// Evaluate the consistency and selection conditions of a prior.
    CheckPrior(CheckPriorArgs),
    /// The n=120, p=200 toy problem: BIC curve, t prior vs Bayesian lasso.
    RunToy(RunToyArgs),
    /// Replicated simulation scenario with aggregated metrics.
    RunScenario(RunScenarioArgs),
    /// Per-sweep timing of the beta update for several block sizes.
    Bench(BenchArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Fit(_) => "fit",
            Command::Tune(_) => "tune",
            Command::Select(_) => "select",
            Command::Intervals(_) => "intervals",
            Command::Bvm(_) => "bvm",
            Command::CheckPrior(_) => "check-prior",
            Command::RunToy(_) => "run-toy",
            Command::RunScenario(_) => "run-scenario",
            Command::Bench(_) => "bench",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    StudentT,
    Laplace,
    Mixture,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cov {
    Independent,
    Equicorrelated,
}

#[derive(Args, Debug, Serialize)]
pub struct DataArgs {
    /// CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the response column.
    #[arg(long, default_value = "y")]
    pub response: String,
    /// Center and scale every non-constant design column.
    #[arg(long)]
    pub standardize: bool,
}

/// Family shape parameters; the scale comes from `--gamma`, `--lambda-n`
/// or the family's own hyperparameter flag.
#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value = "student-t")]
    pub family: Family,
    /// Inverse-gamma mixing shape of the t prior (degrees of freedom 2 a1).
    #[arg(long, default_value_t = 1.5)]
    pub a1: f64,
    /// Slab weight of the mixture prior.
    #[arg(long)]
    pub m1: Option<f64>,
    /// Slab sd of the mixture prior.
    #[arg(long)]
    pub sigma1: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct ScaleArgs {
    /// Global scale exponent: lambda_n = 1 / (sqrt(n log p) p^gamma).
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Global scale lambda_n directly.
    #[arg(long)]
    pub lambda_n: Option<f64>,
    /// t prior mixing rate (overrides the global scale).
    #[arg(long)]
    pub s_n: Option<f64>,
    /// Laplace rate (overrides the global scale).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Mixture spike sd (overrides the global scale).
    #[arg(long)]
    pub sigma0: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct SamplerArgs {
    #[arg(long, default_value_t = 5000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 40_000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 40)]
    pub thin: usize,
    /// `auto` or a positive integer.
    #[arg(long, default_value = "auto")]
    pub block_size: String,
    /// Re-partition a random permutation of the coordinates every sweep.
    #[arg(long)]
    pub permute_blocks: bool,
    /// Inverse-gamma shape of the sigma^2 prior.
    #[arg(long, default_value_t = 1.0)]
    pub a0: f64,
    /// Inverse-gamma rate of the sigma^2 prior.
    #[arg(long, default_value_t = 1.0)]
    pub b0: f64,
    /// Add the latent scales or indicators to the chain dump.
    #[arg(long)]
    pub dump_latents: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    /// table1..table4 or toy; explicit flags below are then ignored.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, value_enum, default_value = "independent")]
    pub cov: Cov,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    /// Make column 0 the constant 1 vector.
    #[arg(long)]
    pub intercept: bool,
    /// Comma-separated leading true coefficients (after the intercept); the rest are 0.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_star: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub scale: ScaleArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sampler: SamplerArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct TuneArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long, default_value = "-0.25:1.1:0.05", allow_hyphen_values = true)]
    pub grid: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub sampler: SamplerArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SelectArgs {
    /// Directory holding chain.csv and chain.meta.json.
    #[arg(long)]
    pub chain: PathBuf,
    /// Decision cut on the inclusion probabilities.
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
    /// Threshold target exponent: prior tail mass p^-(1+u).
    #[arg(long, default_value_t = 0.0)]
    pub u: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct IntervalsArgs {
    #[arg(long)]
    pub chain: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct BvmArgs {
    #[arg(long)]
    pub chain: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    /// Dataset metadata sidecar written by `generate`.
    #[arg(long)]
    pub truth: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckPriorArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub scale: ScaleArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    /// Sparsity of the truth.
    #[arg(long)]
    pub s: usize,
    /// Required tail exponent: tail mass at a_n at most p^-(1+u).
    #[arg(long, default_value_t = 0.0)]
    pub u: f64,
    /// Half-width of the interval on which the density must stay above p^-c_log.
    #[arg(long, default_value_t = 10.0)]
    pub e_n: f64,
    /// Comma-separated true beta/sigma values (default: s ones).
    #[arg(long, allow_hyphen_values = true)]
    pub beta_star: Option<String>,
    #[arg(long, default_value_t = 10.0)]
    pub c_log: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m_eps: f64,
    #[arg(long, default_value_t = 3.0)]
    pub c0: f64,
    #[arg(long, default_value_t = 1001)]
    pub grid_points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct RunToyArgs {
    #[arg(long, default_value_t = 120)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub p: usize,
    #[arg(long, default_value_t = 5000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 40_000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 40)]
    pub thin: usize,
    #[arg(long, default_value = "-0.25:1.1:0.05", allow_hyphen_values = true)]
    pub grid: String,
    /// Skip the Bayesian lasso comparison chain.
    #[arg(long)]
    pub no_lasso: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct RunScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<PathBuf>,
    /// table1..table4.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// Keep every replicate's chains under <out>/chains.
    #[arg(long)]
    pub dump_chains: bool,
    /// Skip the Bayesian lasso comparison.
    #[arg(long)]
    pub no_lasso: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 2000)]
    pub p: usize,
    /// Timed sweeps per block size.
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
}
