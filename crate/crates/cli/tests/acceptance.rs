//! Acceptance suite. Every test writes one `ACCEPTANCE [k] PASS|FAIL` line
//! with the measured values to stderr before asserting. The scenario and toy
//! runs take several minutes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;

use bcs_core::experiments::{
    run_scenario, run_toy, Preset, ScenarioResult, ScenarioSpec, ToyOptions, ToyResult,
};
use bcs_core::inference::default_gamma_grid;
use bcs_core::priors::{check_conditions, ConditionInputs, ConditionSettings};
use bcs_core::sampler::kernels::{beta_full_conditional, block_conditional};
use bcs_core::sampler::timing::block_size_table;
use bcs_core::sampler::{run_chain, ChainState, Latent};
use bcs_core::stats::{batch_means_se, mean};
use bcs_core::{BlockSize, Dataset, PriorFamily, PriorSpec, SamplerConfig, SigmaPrior};
use nalgebra::{dmatrix, dvector, Matrix2, Vector2};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

fn report(k: usize, pass: bool, detail: &str) {
    // Written to the stderr handle rather than through `println!`, which the
    // test harness captures for passing tests.
    let line = format!(
        "ACCEPTANCE [{k}] {} {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

/// n = 5, p = 2 fixture.
fn fixture() -> Dataset {
    let x = dmatrix![
        1.0, 0.3;
        -0.5, 1.2;
        0.8, -0.7;
        1.5, 0.4;
        -1.1, -0.2
    ];
    Dataset::new(dvector![1.2, -0.3, 0.5, 1.9, -1.0], x).unwrap()
}

// ---------------------------------------------------------------- [1]

struct Quadrature {
    beta: [f64; 2],
    sigma2: f64,
}

/// Posterior moments of `(beta_1, beta_2, sigma^2)` by a product trapezoid
/// rule. The local variances are integrated out analytically: each
/// `beta_j / sigma` is a t variable with `2 a1` degrees of freedom and scale
/// `sqrt(s_n / a1)`. The coefficient axes use `beta = c sinh(u)` with `u`
/// uniform so that the spike near zero and the bulk are both resolved.
fn quadrature_posterior(data: &Dataset, a1: f64, s_n: f64, sp: &SigmaPrior) -> Quadrature {
    let n = data.n() as f64;
    let xtx = data.x.tr_mul(&data.x);
    let xty = data.x.tr_mul(&data.y);
    let yty = data.y.norm_squared();
    let nu = 2.0 * a1;
    let scale = (s_n / a1).sqrt();

    let (c, nb): (f64, usize) = (0.005, 801);
    let umax = (6.0 / c).asinh();
    let du = 2.0 * umax / (nb - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..nb)
        .map(|i| {
            let u = -umax + i as f64 * du;
            (c * u.sinh(), c * u.cosh() * du)
        })
        .collect();
    let (vlo, vhi, nv) = (-6.0, 5.0, 241);
    let dv = (vhi - vlo) / (nv - 1) as f64;

    // Per-slice sums are kept relative to the slice maximum and combined
    // with log-sum-exp at the end.
    let mut slices = Vec::with_capacity(nv);
    let mut logw = vec![0.0; nb * nb];
    for k in 0..nv {
        let v = vlo + k as f64 * dv;
        let s2 = v.exp();
        let sigma = s2.sqrt();
        let lp: Vec<f64> = grid
            .iter()
            .map(|&(b, w)| {
                let z = b / (sigma * scale);
                -0.5 * (nu + 1.0) * (z * z / nu).ln_1p() - sigma.ln() + w.ln()
            })
            .collect();
        let base = -(sp.a0 + 1.0) * v - sp.b0 / s2 - 0.5 * n * v + v + dv.ln();
        let mut mx = f64::NEG_INFINITY;
        for i in 0..nb {
            let b1 = grid[i].0;
            for j in 0..nb {
                let b2 = grid[j].0;
                let rss = yty - 2.0 * (b1 * xty[0] + b2 * xty[1])
                    + b1 * b1 * xtx[(0, 0)]
                    + 2.0 * b1 * b2 * xtx[(0, 1)]
                    + b2 * b2 * xtx[(1, 1)];
                let l = base - rss / (2.0 * s2) + lp[i] + lp[j];
                logw[i * nb + j] = l;
                mx = mx.max(l);
            }
        }
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for i in 0..nb {
            for j in 0..nb {
                let w = (logw[i * nb + j] - mx).exp();
                z += w;
                m1 += w * grid[i].0;
                m2 += w * grid[j].0;
            }
        }
        slices.push((mx, z, m1, m2, s2));
    }
    let top = slices.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let (mut z, mut m1, mut m2, mut ms) = (0.0, 0.0, 0.0, 0.0);
    for &(mx, sz, s1, s2m, s2) in &slices {
        let f = (mx - top).exp();
        z += f * sz;
        m1 += f * s1;
        m2 += f * s2m;
        ms += f * sz * s2;
    }
    Quadrature {
        beta: [m1 / z, m2 / z],
        sigma2: ms / z,
    }
}

#[test]
fn criterion_1_conjugacy_oracle() {
    let t0 = std::time::Instant::now();
    let data = fixture();
    let (a1, s_n) = (1.5, 0.01);
    let sp = SigmaPrior::default();
    let exact = quadrature_posterior(&data, a1, s_n, &sp);
    let cfg = SamplerConfig {
        burn_in: 2000,
        iterations: 200_000,
        thin: 1,
        block_size: BlockSize::Auto,
        seed: 11,
        permute_blocks: false,
    };
    let draws = run_chain(&data, &PriorSpec::StudentT { a1, s_n }, &sp, &cfg).unwrap();
    assert_eq!(draws.kept(), 200_000);
    let series = [
        draws.coordinate(0).collect::<Vec<_>>(),
        draws.coordinate(1).collect::<Vec<_>>(),
        draws.draws.iter().map(|d| d.sigma2).collect::<Vec<_>>(),
    ];
    let targets = [exact.beta[0], exact.beta[1], exact.sigma2];
    let mut pass = true;
    let mut detail = String::new();
    for (name, (xs, target)) in ["beta_1", "beta_2", "sigma2"]
        .iter()
        .zip(series.iter().zip(targets))
    {
        let m = mean(xs);
        let se = batch_means_se(xs, 100);
        let tol = (0.02 * target.abs()).max(3.0 * se);
        let ok = (m - target).abs() <= tol;
        pass &= ok;
        detail.push_str(&format!(
            "{name}: gibbs {m:.5} quad {target:.5} tol {tol:.5}; "
        ));
    }
    let secs = t0.elapsed().as_secs_f64();
    pass &= secs <= 120.0;
    report(1, pass, &format!("{detail}runtime {secs:.1}s"));
    assert!(pass);
}

// ---------------------------------------------------------------- [2]

#[test]
fn criterion_2_block_full_equivalence() {
    let t0 = std::time::Instant::now();
    let data = fixture();
    let prior = PriorSpec::StudentT { a1: 1.5, s_n: 0.01 };
    let state = ChainState {
        beta: dvector![0.3, -0.7],
        sigma2: 0.8,
        latent: Latent::Scales(vec![0.5, 2.0]),
    };

    // Joint conditional written out for p = 2, then conditioned by hand.
    let x = &data.x;
    let g = Matrix2::new(
        x.column(0).dot(&x.column(0)) + 1.0 / 0.5,
        x.column(0).dot(&x.column(1)),
        x.column(1).dot(&x.column(0)),
        x.column(1).dot(&x.column(1)) + 1.0 / 2.0,
    );
    let rhs = Vector2::new(x.column(0).dot(&data.y), x.column(1).dot(&data.y));
    let mu = g.try_inverse().unwrap() * rhs;
    let k = g / state.sigma2;

    let mut err: f64 = 0.0;
    let (mu_lib, k_lib) = beta_full_conditional(&state, &data, &prior).unwrap();
    for a in 0..2 {
        err = err.max((mu_lib[a] - mu[a]).abs());
        for b in 0..2 {
            err = err.max((k_lib[(a, b)] - k[(a, b)]).abs());
        }
    }
    for (j, o) in [(0usize, 1usize), (1, 0)] {
        let schur_mean = mu[j] - k[(j, o)] / k[(j, j)] * (state.beta[o] - mu[o]);
        let schur_var = 1.0 / k[(j, j)];
        let (m, cov) = block_conditional(&state, &data, &prior, &[j]).unwrap();
        err = err.max((m[0] - schur_mean).abs());
        err = err.max((cov[(0, 0)] - schur_var).abs());
    }
    let (m, cov) = block_conditional(&state, &data, &prior, &[0, 1]).unwrap();
    let kinv = k.try_inverse().unwrap();
    for a in 0..2 {
        err = err.max((m[a] - mu[a]).abs());
        for b in 0..2 {
            err = err.max((cov[(a, b)] - kinv[(a, b)]).abs());
        }
    }
    let formulas_ok = err <= 1e-10;

    let run = |d: usize| {
        let cfg = SamplerConfig {
            burn_in: 2000,
            iterations: 100_000,
            thin: 1,
            block_size: BlockSize::Fixed(d),
            seed: 21 + d as u64,
            permute_blocks: false,
        };
        run_chain(&data, &prior, &SigmaPrior::default(), &cfg).unwrap()
    };
    let (one, two) = (run(1), run(2));
    assert_eq!((one.meta.block_size_used, two.meta.block_size_used), (1, 2));
    let mut means_ok = true;
    let mut detail = format!("max formula error {err:.2e}; ");
    for j in 0..2 {
        let a: Vec<f64> = one.coordinate(j).collect();
        let b: Vec<f64> = two.coordinate(j).collect();
        let se = (batch_means_se(&a, 100).powi(2) + batch_means_se(&b, 100).powi(2)).sqrt();
        let diff = (mean(&a) - mean(&b)).abs();
        means_ok &= diff <= 3.0 * se;
        detail.push_str(&format!(
            "beta_{}: d=1 {:.5} d=2 {:.5} |diff| {diff:.5} <= 3se {:.5}; ",
            j + 1,
            mean(&a),
            mean(&b),
            3.0 * se
        ));
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = formulas_ok && means_ok && secs <= 60.0;
    report(2, pass, &format!("{detail}runtime {secs:.1}s"));
    assert!(pass);
}

// ---------------------------------------------------------------- [3], [4]

fn table1() -> &'static ScenarioResult {
    static RESULT: OnceLock<ScenarioResult> = OnceLock::new();
    RESULT.get_or_init(|| {
        let mut spec = ScenarioSpec::preset(Preset::Table1, 2024);
        spec.replicates = 20;
        spec.sampler = SamplerConfig {
            burn_in: 2000,
            iterations: 10_000,
            thin: 10,
            ..spec.sampler
        };
        assert!(spec.compare_lasso);
        assert_eq!(spec.gamma_grid, default_gamma_grid());
        run_scenario(&spec, None).unwrap()
    })
}

fn metric(res: &ScenarioResult, method: &str, name: &str) -> f64 {
    res.aggregate
        .metric(method, name)
        .unwrap_or_else(|| panic!("{method}/{name} missing"))
        .mean
}

#[test]
fn criterion_3_table1_desk_scale() {
    let res = table1();
    let l1 = metric(res, "bcs", "l1_true");
    let hits = metric(res, "bcs", "n_true_selected");
    let false_sel = metric(res, "bcs", "n_false_selected");
    let cov_t = metric(res, "bcs", "coverage_true");
    let cov_f = metric(res, "bcs", "coverage_false");
    let ok = res.aggregate.replicates_ok;
    // "= 1.00" is read at the two reported decimals.
    let pass = ok == 20
        && l1 <= 0.6
        && hits >= 2.8
        && false_sel <= 0.5
        && (0.80..=1.00).contains(&cov_t)
        && cov_f >= 0.995;
    report(
        3,
        pass,
        &format!(
            "replicates ok {ok}/20; l1_true {l1:.4} (<= 0.6); true selected {hits:.3} (>= 2.8); \
             false selected {false_sel:.3} (<= 0.5); coverage_true {cov_t:.4} in [0.80, 1.00]; \
             coverage_false {cov_f:.5} (rounds to 1.00)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_4_lasso_over_shrinks() {
    let res = table1();
    let bcs = metric(res, "bcs", "l1_true");
    let lasso = metric(res, "lasso", "l1_true");
    let pass = lasso >= 3.0 * bcs;
    report(
        4,
        pass,
        &format!(
            "lasso l1_true {lasso:.4} vs bcs {bcs:.4}: ratio {:.2} (>= 3)",
            lasso / bcs
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- [5], [6]

fn toy() -> &'static ToyResult {
    static RESULT: OnceLock<ToyResult> = OnceLock::new();
    RESULT.get_or_init(|| {
        let opts = ToyOptions {
            seed: 2024,
            lasso: false,
            ..ToyOptions::default()
        };
        assert_eq!((opts.n, opts.p, opts.s), (120, 200, 4));
        run_toy(&opts).unwrap()
    })
}

#[test]
fn criterion_5_toy_bic_curve() {
    let res = toy();
    let lo = res.mean_bic_at(0.25).expect("grid contains 0.25");
    let hi = res.mean_bic_at(1.1).expect("grid contains 1.1");
    let g = res.tuning.gamma_hat;
    let pass = hi - lo >= 10.0 && (-0.25..=0.8).contains(&g);
    report(
        5,
        pass,
        &format!(
            "mean BIC(1.1) - mean BIC(0.25) = {hi:.2} - {lo:.2} = {:.2} (>= 10); gamma_hat {g} in [-0.25, 0.8]",
            hi - lo
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_bvm() {
    let res = toy();
    let mut pass = res.bvm.support.len() == 4;
    let mut detail = String::new();
    for d in &res.bvm.support {
        let ratio = d.sd_ratio.unwrap_or(f64::NAN);
        let ok = (0.7..=1.3).contains(&ratio) && d.ks_distance <= 0.1 && !d.degenerate;
        pass &= ok;
        detail.push_str(&format!(
            "j={}: sd ratio {ratio:.3}, KS {:.4}; ",
            d.index, d.ks_distance
        ));
    }
    report(
        6,
        pass,
        &format!("{detail}(ratio in [0.7, 1.3], KS <= 0.1)"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- [7]

/// Tail mass from library distribution functions, independent of the crate.
fn reference_tail(prior: &PriorSpec, a: f64) -> f64 {
    match *prior {
        PriorSpec::StudentT { a1, s_n } => {
            let t = StudentsT::new(0.0, (s_n / a1).sqrt(), 2.0 * a1).unwrap();
            2.0 * t.sf(a)
        }
        PriorSpec::Laplace { lambda } => (-lambda * a).exp(),
        PriorSpec::MixtureGaussian { m1, sigma0, sigma1 } => {
            let z0 = Normal::new(0.0, sigma0).unwrap();
            let z1 = Normal::new(0.0, sigma1).unwrap();
            2.0 * ((1.0 - m1) * z0.sf(a) + m1 * z1.sf(a))
        }
    }
}

#[test]
fn criterion_7_threshold_solver() {
    let n = 100;
    let mut worst: f64 = 0.0;
    let mut worst_ref: f64 = 0.0;
    for p in [201usize, 501, 10_000] {
        let lambda_n = bcs_core::priors::scale_from_gamma(n, p, 0.5);
        let priors = [
            PriorFamily::StudentT { a1: 1.5 }.at_scale(lambda_n),
            PriorSpec::Laplace {
                lambda: (n as f64 * (p as f64).ln()).sqrt(),
            },
            PriorFamily::MixtureGaussian {
                m1: 0.05,
                sigma1: 2.0,
            }
            .at_scale(lambda_n),
        ];
        let target = 1.0 / p as f64;
        for prior in priors {
            let a = prior.solve_threshold(target).unwrap();
            worst = worst.max((prior.tail_mass(a) - target).abs() / target);
            worst_ref = worst_ref.max((reference_tail(&prior, a) - target).abs() / target);
        }
    }
    // The reference distribution functions carry their own ~1e-9 error.
    let pass = worst <= 1e-8 && worst_ref <= 1e-6;
    report(
        7,
        pass,
        &format!(
            "max relative error of tail_mass(a) vs 1/p {worst:.2e} (<= 1e-8); \
             against reference CDFs {worst_ref:.2e} (<= 1e-6)"
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- [8]

#[test]
fn criterion_8_condition_checker() {
    let u = 0.5;
    let a1 = 1.5;
    let r = 2.0 * a1 + 1.0;
    let mut pass = true;
    let mut detail = String::new();
    for (n, p, s) in [
        (120usize, 200usize, 4usize),
        (80, 201, 3),
        (100, 501, 3),
        (400, 10_000, 5),
    ] {
        let (nf, pf, sf) = (n as f64, p as f64, s as f64);
        let lambda_n = (sf * pf.ln() / nf).sqrt() * pf.powf(-(u + r) / (r - 1.0));
        let inputs = |prior: PriorSpec, u_target: f64| ConditionInputs {
            prior,
            n,
            p,
            s,
            e_n: 10.0,
            u_target,
            beta_star_over_sigma: vec![1.0; s],
            settings: ConditionSettings::default(),
        };
        // The recipe built with u must pass for any target below u.
        let t = check_conditions(inputs(PriorFamily::StudentT { a1 }.at_scale(lambda_n), 0.0));
        let laplace = check_conditions(inputs(
            PriorSpec::Laplace {
                lambda: (nf * pf.ln()).sqrt(),
            },
            0.0,
        ));
        pass &= t.passes_consistency && !laplace.passes_consistency;
        detail.push_str(&format!(
            "n={n} p={p} s={s}: t passes {} (u achieved {:.3}), laplace passes {} (tail {:.3}); ",
            t.passes_consistency, t.u_achieved, laplace.passes_consistency, laplace.tail_mass
        ));
    }
    report(8, pass, &detail);
    assert!(pass);
}

// ---------------------------------------------------------------- [9]

#[test]
fn criterion_9_blockwise_speed() {
    let (n, p) = (100, 2000);
    let mut beta = vec![0.0; p];
    beta[..4].fill(1.0);
    let design = bcs_core::DesignSpec {
        n,
        p,
        cov: bcs_core::CovStructure::Independent,
        intercept: false,
    };
    let truth = bcs_core::TrueModel::new(beta, 1.0).unwrap();
    let data = bcs_core::model::generate_dataset(&design, &truth, 5).unwrap();
    let prior = PriorFamily::StudentT { a1: 1.5 }.at_gamma(n, p, 0.5);
    let table = block_size_table(&data, &prior, 5, 5).unwrap();
    let get = |label: &str| table.iter().find(|t| t.label == label).unwrap();
    let (auto, full) = (get("auto"), get("full"));
    let speedup = full.median_secs / auto.median_secs;
    let pass = auto.block_size == 59 && full.block_size == p && speedup >= 3.0;
    report(
        9,
        pass,
        &format!(
            "median sweep: auto (d={}) {:.3} ms, full (d={}) {:.1} ms, speedup {speedup:.0}x (>= 3)",
            auto.block_size,
            1e3 * auto.median_secs,
            full.block_size,
            1e3 * full.median_secs
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- [10]

fn bcs(args: &[&str]) -> (bool, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_bcs"))
        .args(args)
        .output()
        .expect("run bcs");
    (out.status.success(), out.stdout)
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_path_buf();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    if dir.is_dir() {
        walk(dir, dir, &mut out);
    }
    out
}

#[test]
fn criterion_10_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let data = root.join("data");
    assert!(
        bcs(&[
            "--seed",
            "5",
            "--out",
            data.to_str().unwrap(),
            "generate",
            "--n",
            "40",
            "--p",
            "30",
            "--beta",
            "1,1,1"
        ])
        .0
    );
    let csv = data.join("data.csv");
    let meta = data.join("data.meta.json");
    let csv = csv.to_str().unwrap();
    let meta = meta.to_str().unwrap();
    let sampler = ["--burn-in", "100", "--iterations", "600", "--thin", "3"];

    // Chain directories the read-only subcommands consume.
    let chain = root.join("chain");
    let mut fit_args = vec![
        "--seed",
        "9",
        "--out",
        chain.to_str().unwrap(),
        "fit",
        "--data",
        csv,
        "--gamma",
        "0.5",
    ];
    fit_args.extend(sampler);
    assert!(bcs(&fit_args).0);
    let chain = chain.to_str().unwrap();

    let mut cases: Vec<(&str, Vec<&str>)> = vec![
        ("generate", vec!["generate", "--preset", "table2"]),
        (
            "fit",
            [
                &[
                    "fit",
                    "--data",
                    csv,
                    "--family",
                    "laplace",
                    "--gamma",
                    "0.2",
                    "--dump-latents",
                ][..],
                &sampler,
            ]
            .concat(),
        ),
        (
            "fit-mixture",
            [
                &[
                    "fit",
                    "--data",
                    csv,
                    "--family",
                    "mixture",
                    "--m1",
                    "0.1",
                    "--sigma1",
                    "2",
                    "--gamma",
                    "0.3",
                    "--block-size",
                    "4",
                    "--permute-blocks",
                ][..],
                &sampler,
            ]
            .concat(),
        ),
        (
            "tune",
            [
                &["tune", "--data", csv, "--grid", "-0.25:1.1:0.45"][..],
                &sampler,
            ]
            .concat(),
        ),
        ("select", vec!["select", "--chain", chain]),
        (
            "intervals",
            vec!["intervals", "--chain", chain, "--alpha", "0.1"],
        ),
        (
            "bvm",
            vec!["bvm", "--chain", chain, "--data", csv, "--truth", meta],
        ),
        (
            "check-prior",
            vec![
                "check-prior",
                "--family",
                "student-t",
                "--a1",
                "1.5",
                "--gamma",
                "0.5",
                "--n",
                "120",
                "--p",
                "200",
                "--s",
                "4",
                "--u",
                "0.5",
            ],
        ),
        (
            "run-toy",
            vec![
                "run-toy",
                "--n",
                "40",
                "--p",
                "30",
                "--burn-in",
                "50",
                "--iterations",
                "300",
                "--thin",
                "3",
                "--grid",
                "0,0.5,1",
            ],
        ),
        (
            "run-scenario",
            vec![
                "run-scenario",
                "--preset",
                "table1",
                "--replicates",
                "3",
                "--burn-in",
                "50",
                "--iterations",
                "200",
                "--thin",
                "2",
                "--dump-chains",
            ],
        ),
    ];
    // Report subcommands also go through their stdout path.
    cases.push((
        "select-stdout",
        vec!["select", "--chain", chain, "--t", "0.3"],
    ));

    let mut pass = true;
    let mut detail = String::new();
    for (name, args) in &cases {
        let mut outputs = Vec::new();
        for (run, jobs) in ["1", "2", "2"].iter().enumerate() {
            let dir = root.join(format!("{name}-{run}"));
            let mut argv = vec!["--seed", "13", "--jobs", jobs];
            let dir_s = dir.to_str().unwrap().to_string();
            if !name.ends_with("-stdout") {
                argv.extend(["--out", dir_s.as_str()]);
            }
            argv.extend(args.iter().copied());
            let (ok, stdout) = bcs(&argv);
            assert!(ok, "{name} failed");
            outputs.push((stdout, snapshot(&dir)));
        }
        let files = outputs[0].1.len();
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        pass &= same && (files > 0 || name.ends_with("-stdout"));
        detail.push_str(&format!(
            "{name} {} ({files} files); ",
            if same { "identical" } else { "DIFFERS" }
        ));
    }
    report(10, pass, &format!("{detail}runs at --jobs 1, 2, 2"));
    assert!(pass);
}
