use nalgebra::{Cholesky, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{BcsError, Result};
use crate::model::{Dataset, TrueModel};
use crate::sampler::PosteriorDraws;
use crate::stats::{ks_distance_std_normal, mean, sd, standardize};

/// Least squares restricted to a known support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleFit {
    pub support: Vec<usize>,
    pub beta_hat: Vec<f64>,
    /// Unbiased: `RSS / (n - |support|)`.
    pub sigma2_hat: f64,
    /// `sigma2_hat (X_S' X_S)^-1`, row-major.
    pub cov: Vec<Vec<f64>>,
}

impl OracleFit {
    pub fn sd(&self, k: usize) -> f64 {
        self.cov[k][k].sqrt()
    }
}

pub fn oracle_ols(data: &Dataset, support: &[usize]) -> Result<OracleFit> {
    let (n, s) = (data.n(), support.len());
    if s >= n {
        return Err(BcsError::Dimension(format!(
            "support of size {s} needs more than {n} observations"
        )));
    }
    if let Some(&j) = support.iter().find(|&&j| j >= data.p()) {
        return Err(BcsError::Dimension(format!(
            "support index {j} out of range for p = {}",
            data.p()
        )));
    }
    let xs = data.x.select_columns(support);
    let gram = xs.tr_mul(&xs);
    let max_diag = gram.diagonal().max();
    let chol = Cholesky::<f64, Dyn>::new(gram).ok_or(BcsError::RankDeficient)?;
    if chol
        .l_dirty()
        .diagonal()
        .iter()
        .any(|l| l * l <= 1e-12 * max_diag)
    {
        return Err(BcsError::RankDeficient);
    }
    let beta = chol.solve(&xs.tr_mul(&data.y));
    let inv = chol.inverse();
    if beta.iter().chain(inv.iter()).any(|v| !v.is_finite()) {
        return Err(BcsError::RankDeficient);
    }
    let resid = &data.y - &xs * &beta;
    let sigma2_hat = resid.norm_squared() / (n - s) as f64;
    let cov = (0..s)
        .map(|r| (0..s).map(|c| sigma2_hat * inv[(r, c)]).collect())
        .collect();
    Ok(OracleFit {
        support: support.to_vec(),
        beta_hat: beta.iter().copied().collect(),
        sigma2_hat,
        cov,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportDiagnostic {
    pub index: usize,
    pub posterior_mean: f64,
    pub posterior_sd: f64,
    pub oracle_mle: f64,
    pub oracle_sd: f64,
    /// `posterior_sd / oracle_sd`; absent when the oracle sd is numerically zero.
    pub sd_ratio: Option<f64>,
    pub ks_distance: f64,
    /// Near-constant draws or a vanishing oracle sd: the shape statistics
    /// are reported but carry no information.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffSupportDiagnostic {
    pub index: usize,
    /// Posterior sd of `beta_j / sigma`.
    pub posterior_sd: f64,
    /// Prior marginal sd of `beta_j / sigma`; absent when infinite.
    pub prior_sd_at_gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvmReport {
    pub oracle_sigma2: f64,
    pub support: Vec<SupportDiagnostic>,
    pub off_support: Vec<OffSupportDiagnostic>,
}

const DEGENERATE_SD: f64 = 1e-10;

/// Compares the posterior of the true-support coordinates with the oracle
/// least-squares normal limit, and the spread of the rest with the prior's.
pub fn bvm_diagnostics(
    draws: &PosteriorDraws,
    data: &Dataset,
    truth: &TrueModel,
) -> Result<BvmReport> {
    if truth.beta_star.len() != data.p() || draws.p() != data.p() {
        return Err(BcsError::Dimension(format!(
            "truth has {} coefficients, draws {}, data {}",
            truth.beta_star.len(),
            draws.p(),
            data.p()
        )));
    }
    if draws.kept() < 2 {
        return Err(BcsError::InvalidParameter(
            "BvM diagnostics need at least two draws".into(),
        ));
    }
    let support = truth.support();
    let oracle = oracle_ols(data, &support)?;

    let per_support = support
        .iter()
        .enumerate()
        .map(|(k, &j)| {
            let xs: Vec<f64> = draws.coordinate(j).collect();
            let (m, s) = (mean(&xs), sd(&xs));
            let osd = oracle.sd(k);
            let scale = 1.0 + m.abs();
            let z = standardize(&xs);
            let flat_oracle = osd <= DEGENERATE_SD * scale;
            SupportDiagnostic {
                index: j,
                posterior_mean: m,
                posterior_sd: s,
                oracle_mle: oracle.beta_hat[k],
                oracle_sd: osd,
                sd_ratio: (!flat_oracle).then(|| s / osd),
                ks_distance: z.as_deref().map_or(1.0, ks_distance_std_normal),
                degenerate: flat_oracle || s <= DEGENERATE_SD * scale,
            }
        })
        .collect();

    let prior_sd = draws.meta.prior.marginal_sd();
    let off_support = (0..data.p())
        .filter(|j| !support.contains(j))
        .map(|j| {
            let scaled: Vec<f64> = draws
                .draws
                .iter()
                .map(|d| d.beta[j] / d.sigma2.sqrt())
                .collect();
            OffSupportDiagnostic {
                index: j,
                posterior_sd: sd(&scaled),
                prior_sd_at_gamma: prior_sd,
            }
        })
        .collect();

    Ok(BvmReport {
        oracle_sigma2: oracle.sigma2_hat,
        support: per_support,
        off_support,
    })
}

/// Oracle two-sided `1 - alpha` normal intervals `beta_hat +- z sd`.
pub fn oracle_intervals(fit: &OracleFit, z: f64) -> Vec<(f64, f64)> {
    (0..fit.support.len())
        .map(|k| {
            let h = z * fit.sd(k);
            (fit.beta_hat[k] - h, fit.beta_hat[k] + h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::selection::tests::draws_from;
    use approx::assert_abs_diff_eq;
    use nalgebra::{dmatrix, dvector, DMatrix, DVector};

    #[test]
    fn saturated_and_intercept_only() {
        let data = Dataset::new(
            dvector![2.0, 4.0, 0.0],
            dmatrix![1.0, 0.0; 0.0, 1.0; 0.0, 0.0],
        )
        .unwrap();
        let fit = oracle_ols(&data, &[0, 1]).unwrap();
        assert_abs_diff_eq!(fit.beta_hat[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.beta_hat[1], 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.sigma2_hat, 0.0, epsilon = 1e-28);

        let ones = Dataset::new(dvector![1.0, 2.0, 6.0], dmatrix![1.0; 1.0; 1.0]).unwrap();
        let fit = oracle_ols(&ones, &[0]).unwrap();
        assert_abs_diff_eq!(fit.beta_hat[0], 3.0, epsilon = 1e-14);
        // RSS = 4 + 1 + 9 on two degrees of freedom.
        assert_abs_diff_eq!(fit.sigma2_hat, 7.0, epsilon = 1e-13);
    }

    #[test]
    fn matches_dense_normal_equations() {
        let x = DMatrix::from_fn(10, 3, |i, j| {
            ((i * 7 + j * 3) % 11) as f64 / 5.0 - 1.0 + (j as f64) * 0.1
        });
        let y = DVector::from_fn(10, |i, _| (i as f64 * 0.7).sin());
        let data = Dataset::new(y.clone(), x.clone()).unwrap();
        let fit = oracle_ols(&data, &[0, 2]).unwrap();
        let xs = x.select_columns(&[0, 2]);
        let expect = (xs.transpose() * &xs)
            .lu()
            .solve(&(xs.transpose() * &y))
            .unwrap();
        assert_abs_diff_eq!(fit.beta_hat[0], expect[0], epsilon = 1e-10);
        assert_abs_diff_eq!(fit.beta_hat[1], expect[1], epsilon = 1e-10);
        assert_abs_diff_eq!(fit.cov[0][1], fit.cov[1][0], epsilon = 1e-14);
    }

    #[test]
    fn errors() {
        let data = Dataset::new(dvector![1.0, 2.0], dmatrix![1.0, 2.0; 2.0, 4.0]).unwrap();
        assert!(matches!(
            oracle_ols(&data, &[0, 1]),
            Err(BcsError::Dimension(_))
        ));
        let data = Dataset::new(
            dvector![1.0, 2.0, 3.0],
            dmatrix![1.0, 2.0; 2.0, 4.0; 3.0, 6.0],
        )
        .unwrap();
        assert!(matches!(
            oracle_ols(&data, &[0, 1]),
            Err(BcsError::RankDeficient)
        ));
    }

    #[test]
    fn orthonormal_design_unit_oracle_sd() {
        // Orthonormal support columns and unit residual variance.
        let x = dmatrix![1.0, 0.0; 0.0, 1.0; 0.0, 0.0; 0.0, 0.0];
        let y = dvector![0.5, -0.5, 1.0, -1.0];
        let data = Dataset::new(y, x).unwrap();
        let fit = oracle_ols(&data, &[0, 1]).unwrap();
        assert_abs_diff_eq!(fit.sigma2_hat, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.sd(0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.sd(1), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn degenerate_draws_are_flagged() {
        // Noise-free data: the oracle sd vanishes and constant draws cannot be standardized.
        let x = dmatrix![1.0, 0.0; 0.0, 1.0; 1.0, 1.0];
        let data = Dataset::new(dvector![1.0, 0.0, 1.0], x).unwrap();
        let truth = TrueModel::new(vec![1.0, 0.0], 0.0).unwrap();
        let d = draws_from(&vec![vec![1.0, 0.01]; 10], &[1.0; 10]);
        let r = bvm_diagnostics(&d, &data, &truth).unwrap();
        assert!(r.support[0].degenerate);
        assert_eq!(r.support[0].ks_distance, 1.0);
        assert_eq!(r.support[0].sd_ratio, None);
        assert_eq!(r.off_support[0].index, 1);
        assert_abs_diff_eq!(r.off_support[0].posterior_sd, 0.0);
        assert_eq!(r.off_support[0].prior_sd_at_gamma, Some(2f64.sqrt()));
    }
}
