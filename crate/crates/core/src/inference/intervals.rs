use serde::{Deserialize, Serialize};

use crate::error::{BcsError, Result};
use crate::sampler::PosteriorDraws;
use crate::stats::nearest_rank;

pub const QUANTILE_METHOD: &str = "empirical-quantile";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub alpha: f64,
    pub method: String,
    pub intervals: Vec<Interval>,
}

/// Equal-tailed `1 - alpha` intervals from nearest-rank quantiles of each
/// coordinate's draws.
pub fn credible_intervals(draws: &PosteriorDraws, alpha: f64) -> Result<IntervalReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BcsError::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if draws.kept() < 2 {
        return Err(BcsError::InvalidParameter(
            "credible intervals need at least two draws".into(),
        ));
    }
    let mut buf = Vec::with_capacity(draws.kept());
    let intervals = (0..draws.p())
        .map(|j| {
            buf.clear();
            buf.extend(draws.coordinate(j));
            buf.sort_by(f64::total_cmp);
            Interval {
                lower: nearest_rank(&buf, alpha / 2.0),
                upper: nearest_rank(&buf, 1.0 - alpha / 2.0),
            }
        })
        .collect();
    Ok(IntervalReport {
        alpha,
        method: QUANTILE_METHOD.to_string(),
        intervals,
    })
}
