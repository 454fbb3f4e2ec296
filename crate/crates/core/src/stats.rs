//! Small summary statistics used on chains and replicate tables.

use libm::erfc;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (divisor `n - 1`); zero for fewer than two values.
pub fn sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

/// Nearest-rank quantile of an ascending slice: element `ceil(prob n)`.
pub fn nearest_rank(sorted: &[f64], prob: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "quantile of an empty sample");
    // Guard against `0.975 * 1000 = 975.0000000000001`.
    let rank = (prob * n as f64 - 1e-9).ceil().max(1.0) as usize;
    sorted[rank.min(n) - 1]
}

/// Monte Carlo standard error of the mean by non-overlapping batch means.
pub fn batch_means_se(xs: &[f64], batches: usize) -> f64 {
    let b = batches.max(2).min(xs.len().max(2));
    let len = xs.len() / b;
    if len == 0 {
        return f64::NAN;
    }
    let means: Vec<f64> = xs[..len * b].chunks(len).map(mean).collect();
    sd(&means) / (b as f64).sqrt()
}

pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Kolmogorov-Smirnov distance between the empirical law of `xs` and N(0, 1).
pub fn ks_distance_std_normal(xs: &[f64]) -> f64 {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = std_normal_cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Standardizes `xs` by its own mean and sample sd. `None` when the sd is
/// zero or not finite.
pub fn standardize(xs: &[f64]) -> Option<Vec<f64>> {
    let m = mean(xs);
    let s = sd(xs);
    if !(s > 0.0 && s.is_finite()) {
        return None;
    }
    Some(xs.iter().map(|x| (x - m) / s).collect())
}
