use serde::{Deserialize, Serialize};

use crate::error::{BcsError, Result};
use crate::inference::intervals::IntervalReport;
use crate::inference::selection::SelectionReport;
use crate::model::TrueModel;
use crate::sampler::PosteriorDraws;

/// Accuracy of one fit against a known truth. Group averages are absent
/// when the group is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub l1_true: f64,
    pub l1_false: f64,
    pub n_true_selected: usize,
    pub n_false_selected: usize,
    pub coverage_true: Option<f64>,
    pub coverage_false: Option<f64>,
    pub length_true: Option<f64>,
    pub length_false: Option<f64>,
}

impl Metrics {
    pub const NAMES: [&'static str; 8] = [
        "l1_true",
        "l1_false",
        "n_true_selected",
        "n_false_selected",
        "coverage_true",
        "coverage_false",
        "length_true",
        "length_false",
    ];

    /// Values in [`Metrics::NAMES`] order.
    pub fn values(&self) -> [Option<f64>; 8] {
        [
            Some(self.l1_true),
            Some(self.l1_false),
            Some(self.n_true_selected as f64),
            Some(self.n_false_selected as f64),
            self.coverage_true,
            self.coverage_false,
            self.length_true,
            self.length_false,
        ]
    }
}

fn average(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Scores the posterior mean, the selected model and the intervals.
pub fn evaluate_metrics(
    report: &SelectionReport,
    intervals: &IntervalReport,
    draws: &PosteriorDraws,
    truth: &TrueModel,
) -> Result<Metrics> {
    let p = truth.beta_star.len();
    if draws.p() != p || report.q.len() != p || intervals.intervals.len() != p {
        return Err(BcsError::Dimension(format!(
            "truth has {p} coefficients, draws {}, selection {}, intervals {}",
            draws.p(),
            report.q.len(),
            intervals.intervals.len()
        )));
    }
    let mean = draws.posterior_mean();
    let is_true = |j: usize| truth.beta_star[j] != 0.0;
    let (true_idx, false_idx): (Vec<usize>, Vec<usize>) = (0..p).partition(|&j| is_true(j));

    let l1_true = true_idx
        .iter()
        .map(|&j| (truth.beta_star[j] - mean[j]).abs())
        .sum();
    let l1_false = false_idx.iter().map(|&j| mean[j].abs()).sum();
    let n_true_selected = report.selected.iter().filter(|&&j| is_true(j)).count();
    let ci = &intervals.intervals;
    let covered = |j: usize| {
        if ci[j].contains(truth.beta_star[j]) {
            1.0
        } else {
            0.0
        }
    };

    Ok(Metrics {
        l1_true,
        l1_false,
        n_true_selected,
        n_false_selected: report.selected.len() - n_true_selected,
        coverage_true: average(true_idx.iter().map(|&j| covered(j))),
        coverage_false: average(false_idx.iter().map(|&j| covered(j))),
        length_true: average(true_idx.iter().map(|&j| ci[j].length())),
        length_false: average(false_idx.iter().map(|&j| ci[j].length())),
    })
}
