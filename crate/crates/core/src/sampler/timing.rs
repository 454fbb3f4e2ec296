//! Wall-clock timing of the blockwise `beta` update.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::Dataset;
use crate::priors::{PriorSpec, SigmaPrior};
use crate::rng::{self, STREAM_CHAIN};
use crate::sampler::chain::{BlockSize, GibbsKernel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTiming {
    pub label: String,
    pub block_size: usize,
    pub reps: usize,
    pub median_secs: f64,
    pub min_secs: f64,
    pub max_secs: f64,
}

/// Median wall time of `reps` blockwise `beta` sweeps, after one untimed
/// warm-up sweep. Block caches are built before timing starts.
pub fn time_beta_sweeps(
    data: &Dataset,
    prior: &PriorSpec,
    block_size: BlockSize,
    reps: usize,
    seed: u64,
    label: &str,
) -> Result<SweepTiming> {
    let kernel = GibbsKernel::new(data, *prior, SigmaPrior::default(), block_size, false)?;
    let mut rng = rng::stream(seed, STREAM_CHAIN);
    let mut state = kernel.initial_state();
    kernel.beta_sweep(&mut state, &mut rng)?;
    let mut secs = Vec::with_capacity(reps.max(1));
    for _ in 0..reps.max(1) {
        let t0 = Instant::now();
        kernel.beta_sweep(&mut state, &mut rng)?;
        secs.push(t0.elapsed().as_secs_f64());
    }
    secs.sort_by(f64::total_cmp);
    let k = secs.len();
    let median = if k % 2 == 1 {
        secs[k / 2]
    } else {
        0.5 * (secs[k / 2 - 1] + secs[k / 2])
    };
    Ok(SweepTiming {
        label: label.to_string(),
        block_size: kernel.block_size(),
        reps: k,
        median_secs: median,
        min_secs: secs[0],
        max_secs: secs[k - 1],
    })
}

/// Timings for single-coordinate blocks, the automatic block size and one
/// full `p x p` factorize-and-solve block.
pub fn block_size_table(
    data: &Dataset,
    prior: &PriorSpec,
    reps: usize,
    seed: u64,
) -> Result<Vec<SweepTiming>> {
    let p = data.p();
    [
        (BlockSize::Fixed(1), "d=1"),
        (BlockSize::Auto, "auto"),
        (BlockSize::Fixed(p), "full"),
    ]
    .into_iter()
    .map(|(b, label)| time_beta_sweeps(data, prior, b, reps, seed, label))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::kernels::tests::fixture;

    #[test]
    fn table_shape() {
        let data = fixture();
        let prior = PriorSpec::StudentT { a1: 1.5, s_n: 0.1 };
        let t = block_size_table(&data, &prior, 4, 1).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0].block_size, 1);
        assert_eq!(t[2].block_size, 2);
        assert!(t
            .iter()
            .all(|r| r.min_secs <= r.median_secs && r.median_secs <= r.max_secs));
    }
}
