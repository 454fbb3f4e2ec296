use std::path::{Path, PathBuf};

use bcs_core::experiments::{self, Preset, ScenarioSpec, ToyOptions};
use bcs_core::inference::{bvm_diagnostics, credible_intervals, select_with, tune_gamma};
use bcs_core::io_util::{ensure_dir, read_json, write_json};
use bcs_core::manifest::write_manifest;
use bcs_core::model::{generate_dataset, load_csv, write_csv, DatasetMeta};
use bcs_core::priors::{check_conditions, ConditionInputs, ConditionSettings};
use bcs_core::sampler::timing::block_size_table;
use bcs_core::sampler::{read_draws, run_chain, write_draws};
use bcs_core::{
    BcsError, BlockSize, CovStructure, Dataset, DesignSpec, PriorFamily, PriorSpec, SamplerConfig,
    SigmaPrior, TrueModel,
};
use serde::Serialize;
use serde_json::Value;

use crate::args::*;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag combination or value; exit code 1.
    Usage(String),
    /// Failure while running; exit code 2.
    Runtime(String),
}

impl From<BcsError> for CliError {
    fn from(e: BcsError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Writes to stdout; a closed pipe (`bcs ... | head`) is not an error.
fn out(text: &str) -> CliResult<()> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match writeln!(stdout, "{text}").and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError::Runtime(format!("cannot write to stdout: {e}")))
        }
        _ => Ok(()),
    }
}

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// What a handler needs besides its own flags.
pub struct Context {
    pub seed: u64,
    /// `Some` only when `--seed` was given explicitly.
    pub explicit_seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Resolved configuration echoed into manifests.
    pub resolved: Value,
}

impl Context {
    fn out_dir(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }
}

pub fn dispatch(cmd: &Command, ctx: &Context) -> CliResult<()> {
    match cmd {
        Command::Generate(a) => generate(a, ctx),
        Command::Fit(a) => fit(a, ctx),
        Command::Tune(a) => tune(a, ctx),
        Command::Select(a) => select(a, ctx),
        Command::Intervals(a) => intervals(a, ctx),
        Command::Bvm(a) => bvm(a, ctx),
        Command::CheckPrior(a) => check_prior(a, ctx),
        Command::RunToy(a) => run_toy(a, ctx),
        Command::RunScenario(a) => run_scenario(a, ctx),
        Command::Bench(a) => bench(a, ctx),
    }
}

fn parse_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{what}: `{t}` is not a number")))
        })
        .collect()
}

/// `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let v = parse_list(&format!("{start},{stop},{step}"), "grid")?;
            let (start, stop, step) = (v[0], v[1], v[2]);
            if step.is_nan() || step <= 0.0 || stop < start {
                return usage(format!("grid `{s}` needs step > 0 and stop >= start"));
            }
            let k = ((stop - start) / step + 1e-9).floor() as usize;
            // Rounded to 12 decimals so that 0.1 + 0.2 style drift never
            // leaks into file names or reports.
            Ok((0..=k)
                .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                .collect())
        }
        [_] => {
            let v = parse_list(s, "grid")?;
            if v.is_empty() {
                return usage("empty grid");
            }
            Ok(v)
        }
        _ => usage(format!("cannot parse grid `{s}`")),
    }
}

fn parse_block_size(s: &str) -> CliResult<BlockSize> {
    if s == "auto" {
        return Ok(BlockSize::Auto);
    }
    match s.parse::<usize>() {
        Ok(d) if d > 0 => Ok(BlockSize::Fixed(d)),
        _ => usage(format!(
            "block size must be `auto` or a positive integer, got `{s}`"
        )),
    }
}

fn sampler_config(a: &SamplerArgs, seed: u64) -> CliResult<SamplerConfig> {
    let cfg = SamplerConfig {
        burn_in: a.burn_in,
        iterations: a.iterations,
        thin: a.thin,
        block_size: parse_block_size(&a.block_size)?,
        seed,
        permute_blocks: a.permute_blocks,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn sigma_prior(a: &SamplerArgs) -> CliResult<SigmaPrior> {
    let sp = SigmaPrior { a0: a.a0, b0: a.b0 };
    sp.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(sp)
}

fn family(a: &FamilyArgs) -> CliResult<PriorFamily> {
    match a.family {
        Family::StudentT => Ok(PriorFamily::StudentT { a1: a.a1 }),
        Family::Laplace => Ok(PriorFamily::Laplace),
        Family::Mixture => match (a.m1, a.sigma1) {
            (Some(m1), Some(sigma1)) => Ok(PriorFamily::MixtureGaussian { m1, sigma1 }),
            _ => usage("the mixture family needs --m1 and --sigma1"),
        },
    }
}

/// The family's own scale flag wins, then `--gamma`, then `--lambda-n`.
pub fn resolve_prior(f: &FamilyArgs, s: &ScaleArgs, n: usize, p: usize) -> CliResult<PriorSpec> {
    let fam = family(f)?;
    let foreign = match f.family {
        Family::StudentT => [("--lambda", s.lambda), ("--sigma0", s.sigma0)],
        Family::Laplace => [("--s-n", s.s_n), ("--sigma0", s.sigma0)],
        Family::Mixture => [("--s-n", s.s_n), ("--lambda", s.lambda)],
    };
    if let Some((flag, _)) = foreign.iter().find(|(_, v)| v.is_some()) {
        return usage(format!(
            "{flag} does not apply to the {:?} family",
            f.family
        ));
    }
    let direct = match (fam, s.s_n, s.lambda, s.sigma0) {
        (PriorFamily::StudentT { a1 }, Some(s_n), _, _) => Some(PriorSpec::StudentT { a1, s_n }),
        (PriorFamily::Laplace, _, Some(lambda), _) => Some(PriorSpec::Laplace { lambda }),
        (PriorFamily::MixtureGaussian { m1, sigma1 }, _, _, Some(sigma0)) => {
            Some(PriorSpec::MixtureGaussian { m1, sigma0, sigma1 })
        }
        _ => None,
    };
    let prior = match (direct, s.gamma, s.lambda_n) {
        (Some(prior), _, _) => prior,
        (None, Some(g), _) => fam.at_gamma(n, p, g),
        (None, None, Some(l)) => fam.at_scale(l),
        (None, None, None) => {
            return usage("give the prior scale with --gamma, --lambda-n or the family's own flag")
        }
    };
    prior
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(prior)
}

fn load_data(a: &DataArgs) -> CliResult<Dataset> {
    let mut data = load_csv(&a.data, &a.response)?;
    if a.standardize {
        data.standardize_columns();
    }
    Ok(data)
}

fn finish(dir: &Path, files: &[String], ctx: &Context) -> CliResult<()> {
    let m = write_manifest(dir, files, ctx.resolved.clone())?;
    log::info!("wrote {} files to {}", m.files.len(), dir.display());
    Ok(())
}

/// Pretty JSON on stdout, or `<out>/<name>` plus a manifest when `--out` is set.
fn emit<T: Serialize>(value: &T, name: &str, ctx: &Context) -> CliResult<()> {
    match &ctx.out {
        Some(dir) => {
            ensure_dir(dir)?;
            write_json(&dir.join(name), value)?;
            finish(dir, &[name.to_string()], ctx)
        }
        None => {
            let text = serde_json::to_string_pretty(value)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            out(&text)
        }
    }
}

fn generate(a: &GenerateArgs, ctx: &Context) -> CliResult<()> {
    let (design, truth) = match a.preset.as_deref() {
        Some("toy") => {
            let o = ToyOptions::default();
            (o.design(), o.truth())
        }
        Some(name) => {
            let preset: Preset = name
                .parse()
                .map_err(|e: BcsError| CliError::Usage(e.to_string()))?;
            let s = ScenarioSpec::preset(preset, ctx.seed);
            (s.design(), s.truth)
        }
        None => {
            let (Some(n), Some(p)) = (a.n, a.p) else {
                return usage("generate needs --preset or both --n and --p");
            };
            let cov = match a.cov {
                Cov::Independent => CovStructure::Independent,
                Cov::Equicorrelated => CovStructure::EquiCorrelated { rho: a.rho },
            };
            let lead = parse_list(&a.beta, "--beta")?;
            let first = usize::from(a.intercept);
            if first + lead.len() > p {
                return usage(format!("{} coefficients do not fit in p = {p}", lead.len()));
            }
            let mut beta = vec![0.0; p];
            beta[first..first + lead.len()].copy_from_slice(&lead);
            let truth =
                TrueModel::new(beta, a.sigma_star).map_err(|e| CliError::Usage(e.to_string()))?;
            let design = DesignSpec {
                n,
                p,
                cov,
                intercept: a.intercept,
            };
            (design, truth)
        }
    };
    let data = generate_dataset(&design, &truth, ctx.seed)?;
    let dir = ctx.out_dir("bcs-data");
    ensure_dir(&dir)?;
    write_csv(&data, &dir.join("data.csv"))?;
    write_json(
        &dir.join("data.meta.json"),
        &DatasetMeta::new(&design, &truth, ctx.seed),
    )?;
    finish(&dir, &["data.csv".into(), "data.meta.json".into()], ctx)
}

fn fit(a: &FitArgs, ctx: &Context) -> CliResult<()> {
    let data = load_data(&a.data)?;
    let prior = resolve_prior(&a.family, &a.scale, data.n(), data.p())?;
    let cfg = sampler_config(&a.sampler, ctx.seed)?;
    let sp = sigma_prior(&a.sampler)?;
    let mut draws = run_chain(&data, &prior, &sp, &cfg)?;
    if a.scale.s_n.is_none() && a.scale.lambda.is_none() && a.scale.sigma0.is_none() {
        draws.meta.gamma = a.scale.gamma;
    }
    let dir = ctx.out_dir("bcs-fit");
    write_draws(&dir, &draws, a.sampler.dump_latents)?;
    finish(&dir, &["chain.csv".into(), "chain.meta.json".into()], ctx)
}

fn tune(a: &TuneArgs, ctx: &Context) -> CliResult<()> {
    let data = load_data(&a.data)?;
    let fam = family(&a.family)?;
    let grid = parse_grid(&a.grid)?;
    let cfg = sampler_config(&a.sampler, ctx.seed)?;
    let sp = sigma_prior(&a.sampler)?;
    let tuned = tune_gamma(&data, &fam, &sp, &grid, &cfg)?;
    log::info!("gamma_hat = {}", tuned.report.gamma_hat);
    let dir = ctx.out_dir("bcs-tune");
    ensure_dir(&dir)?;
    let mut files = experiments::write_tuning(&dir, &tuned.report)?;
    write_draws(&dir, &tuned.draws, a.sampler.dump_latents)?;
    files.extend(["chain.csv".into(), "chain.meta.json".into()]);
    finish(&dir, &files, ctx)
}

fn select(a: &SelectArgs, ctx: &Context) -> CliResult<()> {
    let draws = read_draws(&a.chain)?;
    if !(0.0..=1.0).contains(&a.t) {
        return usage(format!("--t must lie in [0, 1], got {}", a.t));
    }
    let report = select_with(&draws, &draws.meta.prior, a.t, a.u)?;
    emit(&report, "selection.json", ctx)
}

fn intervals(a: &IntervalsArgs, ctx: &Context) -> CliResult<()> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return usage(format!("--alpha must lie in (0, 1), got {}", a.alpha));
    }
    let draws = read_draws(&a.chain)?;
    let report = credible_intervals(&draws, a.alpha)?;
    emit(&report, "intervals.json", ctx)
}

fn bvm(a: &BvmArgs, ctx: &Context) -> CliResult<()> {
    let draws = read_draws(&a.chain)?;
    let data = load_data(&a.data)?;
    let meta: DatasetMeta = read_json(&a.truth)?;
    let report = bvm_diagnostics(&draws, &data, &meta.truth)?;
    emit(&report, "bvm.json", ctx)
}

fn check_prior(a: &CheckPriorArgs, ctx: &Context) -> CliResult<()> {
    if a.n < 2 || a.p < 2 {
        return usage("check-prior needs n >= 2 and p >= 2");
    }
    if a.s > a.p {
        return usage(format!("s = {} exceeds p = {}", a.s, a.p));
    }
    let prior = resolve_prior(&a.family, &a.scale, a.n, a.p)?;
    let beta_star = match &a.beta_star {
        Some(s) => parse_list(s, "--beta-star")?,
        None => vec![1.0; a.s],
    };
    let report = check_conditions(ConditionInputs {
        prior,
        n: a.n,
        p: a.p,
        s: a.s,
        e_n: a.e_n,
        u_target: a.u,
        beta_star_over_sigma: beta_star,
        settings: ConditionSettings {
            c_log: a.c_log,
            m_eps: a.m_eps,
            c0: a.c0,
            grid: a.grid_points,
        },
    });
    emit(&report, "conditions.json", ctx)
}

fn run_toy(a: &RunToyArgs, ctx: &Context) -> CliResult<()> {
    let defaults = ToyOptions::default();
    let opts = ToyOptions {
        n: a.n,
        p: a.p,
        s: defaults.s.min(a.p),
        seed: ctx.seed,
        gamma_grid: parse_grid(&a.grid)?,
        sampler: SamplerConfig {
            burn_in: a.burn_in,
            iterations: a.iterations,
            thin: a.thin,
            ..defaults.sampler
        },
        lasso: !a.no_lasso,
        ..defaults
    };
    opts.sampler
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let res = experiments::run_toy(&opts)?;
    let dir = ctx.out_dir("bcs-toy");
    experiments::persist_toy(&res, &dir, ctx.resolved.clone())?;
    out(&format!(
        "gamma_hat = {}  selected = {:?}",
        res.tuning.gamma_hat, res.selection.selected
    ))
}

fn run_scenario(a: &RunScenarioArgs, ctx: &Context) -> CliResult<()> {
    let mut spec = match (&a.spec, &a.preset) {
        (Some(path), _) => {
            let mut spec: ScenarioSpec = read_json(path)?;
            if let Some(seed) = ctx.explicit_seed {
                spec.base_seed = seed;
            }
            spec
        }
        (None, Some(name)) => {
            let preset: Preset = name
                .parse()
                .map_err(|e: BcsError| CliError::Usage(e.to_string()))?;
            ScenarioSpec::preset(preset, ctx.seed)
        }
        (None, None) => return usage("run-scenario needs --spec or --preset"),
    };
    if let Some(r) = a.replicates {
        spec.replicates = r;
    }
    if let Some(b) = a.burn_in {
        spec.sampler.burn_in = b;
    }
    if let Some(i) = a.iterations {
        spec.sampler.iterations = i;
    }
    if let Some(t) = a.thin {
        spec.sampler.thin = t;
    }
    if a.no_lasso {
        spec.compare_lasso = false;
    }
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let dir = ctx.out_dir("bcs-scenario");
    ensure_dir(&dir)?;
    let chains = dir.join(experiments::persist::CHAINS_DIR);
    let result = experiments::run_scenario(&spec, a.dump_chains.then_some(chains.as_path()))?;
    experiments::persist(&result, &dir, ctx.resolved.clone())?;
    let text = serde_json::to_string_pretty(&result.aggregate)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    out(&text)?;
    let failed = result.aggregate.replicates_failed;
    if failed > 0 {
        for row in result.rows.iter().filter(|r| !r.ok()) {
            log::error!(
                "replicate {} failed: {}",
                row.replicate,
                row.error.as_deref().unwrap_or("unknown error")
            );
        }
        return Err(CliError::Runtime(format!(
            "{failed} of {} replicates failed",
            spec.replicates
        )));
    }
    Ok(())
}

fn bench(a: &BenchArgs, ctx: &Context) -> CliResult<()> {
    if a.n < 2 || a.p < 2 || a.reps == 0 {
        return usage("bench needs n >= 2, p >= 2 and reps >= 1");
    }
    let design = DesignSpec {
        n: a.n,
        p: a.p,
        cov: CovStructure::Independent,
        intercept: false,
    };
    let mut beta = vec![0.0; a.p];
    let s = 4.min(a.p);
    beta[..s].fill(1.0);
    let truth = TrueModel::new(beta, 1.0)?;
    let data = generate_dataset(&design, &truth, ctx.seed)?;
    let prior = PriorFamily::StudentT { a1: 1.5 }.at_gamma(a.n, a.p, 0.5);
    let table = block_size_table(&data, &prior, a.reps, ctx.seed)?;
    let mut lines = vec![format!(
        "{:<6} {:>6} {:>14} {:>14} {:>14}",
        "block", "d", "median_ms", "min_ms", "max_ms"
    )];
    for t in &table {
        lines.push(format!(
            "{:<6} {:>6} {:>14.4} {:>14.4} {:>14.4}",
            t.label,
            t.block_size,
            1e3 * t.median_secs,
            1e3 * t.min_secs,
            1e3 * t.max_secs
        ));
    }
    out(&lines.join("\n"))?;
    if let Some(dir) = &ctx.out {
        ensure_dir(dir)?;
        write_json(&dir.join("bench.json"), &table)?;
        finish(dir, &["bench.json".into()], ctx)?;
    }
    Ok(())
}
