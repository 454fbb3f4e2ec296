//! Reproducible random streams keyed by `(seed, stream)`.
//!
//! Every consumer of randomness gets its own ChaCha stream so that the
//! output of a computation never depends on how work was scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type BcsRng = ChaCha8Rng;

/// Stream used by synthetic data generation.
pub const STREAM_DATA: u64 = 0;
/// Stream used by a Gibbs chain.
pub const STREAM_CHAIN: u64 = 1;

pub fn stream(seed: u64, stream: u64) -> BcsRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer; decorrelates nearby seeds such as `base + r`.
pub fn mix_seed(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
