use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::priors::PriorSpec;

/// Per-family latent block of the Gibbs state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Latent {
    /// Local variances `lambda_j^2` (Student-t and Laplace).
    Scales(Vec<f64>),
    /// Slab indicators `xi_j` (two-component mixture).
    Indicators(Vec<bool>),
    /// Not recorded, e.g. a chain reloaded from a dump without latents.
    Omitted,
}

/// One Gibbs state `(beta, sigma^2, latents)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub beta: DVector<f64>,
    pub sigma2: f64,
    pub latent: Latent,
}

impl ChainState {
    pub fn p(&self) -> usize {
        self.beta.len()
    }

    /// Conditional prior variance of `beta_j / sigma`: `lambda_j^2` or `sigma_{xi_j}^2`.
    pub fn prior_variance(&self, prior: &PriorSpec, j: usize) -> f64 {
        match (&self.latent, prior) {
            (Latent::Scales(l2), _) => l2[j],
            (Latent::Indicators(z), PriorSpec::MixtureGaussian { sigma0, sigma1, .. }) => {
                if z[j] {
                    sigma1 * sigma1
                } else {
                    sigma0 * sigma0
                }
            }
            _ => panic!(
                "latent block {:?} does not match prior {prior:?}",
                self.latent
            ),
        }
    }

    pub fn prior_precisions(&self, prior: &PriorSpec) -> Vec<f64> {
        (0..self.p())
            .map(|j| 1.0 / self.prior_variance(prior, j))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.sigma2.is_finite()
            && self.beta.iter().all(|b| b.is_finite())
            && match &self.latent {
                Latent::Scales(l2) => l2.iter().all(|v| v.is_finite() && *v > 0.0),
                _ => true,
            }
    }

    /// Initial state: `beta = 0`, `sigma^2 = var(y)`, latents at their prior scale.
    pub fn initial(prior: &PriorSpec, p: usize, response_variance: f64) -> Self {
        let sigma2 = if response_variance > 0.0 && response_variance.is_finite() {
            response_variance
        } else {
            1.0
        };
        let latent = match *prior {
            PriorSpec::StudentT { s_n, .. } => Latent::Scales(vec![s_n; p]),
            PriorSpec::Laplace { lambda } => Latent::Scales(vec![2.0 / (lambda * lambda); p]),
            PriorSpec::MixtureGaussian { .. } => Latent::Indicators(vec![false; p]),
        };
        Self {
            beta: DVector::zeros(p),
            sigma2,
            latent,
        }
    }
}
