//! Long-run checks of the Gibbs sampler against direct numerical
//! integration of the joint posterior.

use bcs_core::model::{generate_dataset, CovStructure, Dataset, DesignSpec, TrueModel};
use bcs_core::priors::{PriorSpec, SigmaPrior};
use bcs_core::sampler::{run_chain, BlockSize, PosteriorDraws, SamplerConfig};
use bcs_core::stats::{batch_means_se, mean};
use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

fn one_column() -> Dataset {
    let x = DMatrix::from_column_slice(5, 1, &[1.0, -0.5, 0.8, 1.5, -1.1]);
    let y = DVector::from_vec(vec![1.2, -0.3, 0.5, 1.9, -1.0]);
    Dataset::new(y, x).unwrap()
}

/// Marginal prior density of `beta / sigma`, written out per family.
fn prior_pdf(prior: &PriorSpec, x: f64) -> f64 {
    use std::f64::consts::PI;
    match *prior {
        PriorSpec::StudentT { a1, s_n } => {
            let nu = 2.0 * a1;
            let scale = (s_n / a1).sqrt();
            let t = x / scale;
            (ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0)).exp() / ((nu * PI).sqrt() * scale)
                * (1.0 + t * t / nu).powf(-(nu + 1.0) / 2.0)
        }
        PriorSpec::Laplace { lambda } => 0.5 * lambda * (-lambda * x.abs()).exp(),
        PriorSpec::MixtureGaussian { m1, sigma0, sigma1 } => {
            let n = |s: f64| (-0.5 * x * x / (s * s)).exp() / (s * (2.0 * PI).sqrt());
            (1.0 - m1) * n(sigma0) + m1 * n(sigma1)
        }
    }
}

struct Moments {
    beta: f64,
    sigma2: f64,
    beta_sq: f64,
}

/// `E[beta]`, `E[sigma^2]` and `E[beta^2]` under
/// `p(y | beta, s2) (1/s) g(beta/s) IG(s2; a0, b0)` on a product grid.
fn quadrature(data: &Dataset, prior: &PriorSpec, sp: &SigmaPrior) -> Moments {
    let x: Vec<f64> = data.x.column(0).iter().copied().collect();
    let y: Vec<f64> = data.y.iter().copied().collect();
    let n = y.len() as f64;
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();

    let (nb, ns) = (3001, 901);
    let (b_lo, b_hi) = (-6.0, 6.0);
    let (t_lo, t_hi) = (-9.0, 6.0);
    let db = (b_hi - b_lo) / (nb - 1) as f64;
    let dt = (t_hi - t_lo) / (ns - 1) as f64;
    let (mut z, mut mb, mut ms, mut mb2) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..ns {
        let t = t_lo + i as f64 * dt;
        let s2 = t.exp();
        let s = s2.sqrt();
        // IG(a0, b0) density in log sigma^2 picks up the Jacobian s2.
        let log_sig = -(sp.a0 + 1.0) * t - sp.b0 / s2 + t - 0.5 * n * t;
        for k in 0..nb {
            let b = b_lo + k as f64 * db;
            let rss = syy - 2.0 * b * sxy + b * b * sxx;
            let w = (log_sig - rss / (2.0 * s2)).exp() * prior_pdf(prior, b / s) / s;
            z += w;
            mb += w * b;
            ms += w * s2;
            mb2 += w * b * b;
        }
    }
    Moments {
        beta: mb / z,
        sigma2: ms / z,
        beta_sq: mb2 / z,
    }
}

fn long_chain(data: &Dataset, prior: &PriorSpec, block: BlockSize, seed: u64) -> PosteriorDraws {
    let cfg = SamplerConfig {
        burn_in: 2000,
        iterations: 200_000,
        thin: 2,
        block_size: block,
        seed,
        permute_blocks: false,
    };
    run_chain(data, prior, &SigmaPrior::default(), &cfg).unwrap()
}

fn families() -> [PriorSpec; 3] {
    [
        PriorSpec::StudentT { a1: 1.0, s_n: 0.05 },
        PriorSpec::Laplace { lambda: 3.0 },
        PriorSpec::MixtureGaussian {
            m1: 0.3,
            sigma0: 0.05,
            sigma1: 2.0,
        },
    ]
}

#[test]
fn matches_quadrature_for_every_family() {
    let data = one_column();
    let sp = SigmaPrior::default();
    for prior in families() {
        let exact = quadrature(&data, &prior, &sp);
        let draws = long_chain(&data, &prior, BlockSize::Auto, 11);
        let b: Vec<f64> = draws.coordinate(0).collect();
        let b2: Vec<f64> = b.iter().map(|v| v * v).collect();
        let s2: Vec<f64> = draws.draws.iter().map(|d| d.sigma2).collect();
        for (name, xs, target) in [
            ("beta", &b, exact.beta),
            ("beta^2", &b2, exact.beta_sq),
            ("sigma2", &s2, exact.sigma2),
        ] {
            let m = mean(xs);
            let se = batch_means_se(xs, 50);
            println!(
                "{} {name}: chain {m:.5} (se {se:.5}), quadrature {target:.5}",
                prior.family_name()
            );
            assert!(
                (m - target).abs() < 5.0 * se + 2e-3,
                "{} {name}: {m} vs {target} (se {se})",
                prior.family_name()
            );
        }
    }
}

#[test]
fn block_sizes_agree_in_the_long_run() {
    let truth = TrueModel::new(vec![1.5, -1.0, 0.0, 0.0, 0.5, 0.0], 1.0).unwrap();
    let design = DesignSpec {
        n: 30,
        p: 6,
        cov: CovStructure::EquiCorrelated { rho: 0.5 },
        intercept: false,
    };
    let data = generate_dataset(&design, &truth, 3).unwrap();
    let prior = PriorSpec::StudentT { a1: 1.0, s_n: 0.05 };
    let runs: Vec<PosteriorDraws> = [1, 2, 6]
        .into_iter()
        .map(|d| long_chain(&data, &prior, BlockSize::Fixed(d), 100 + d as u64))
        .collect();
    for j in 0..6 {
        let stats: Vec<(f64, f64)> = runs
            .iter()
            .map(|r| {
                let xs: Vec<f64> = r.coordinate(j).collect();
                (mean(&xs), batch_means_se(&xs, 50))
            })
            .collect();
        for w in stats.windows(2) {
            let ((m1, s1), (m2, s2)) = (w[0], w[1]);
            let tol = 5.0 * (s1 * s1 + s2 * s2).sqrt() + 2e-3;
            assert!((m1 - m2).abs() < tol, "coordinate {j}: {m1} vs {m2}");
        }
    }
}
