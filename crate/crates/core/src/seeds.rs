//! Seed derivation for reproducible sampling.
//!
//! Every sampled object is a function of an explicit `u64` seed. Sweeps derive
//! one sub-seed per trial from `(seed, trial index)`, so results do not depend
//! on execution order or on how trials are spread over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed for trial `index` of a sweep seeded with `seed`.
pub fn derive(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Independent sub-seed streams within one trial (`lane` 0, 1, 2, ...).
pub fn lane(seed: u64, lane: u64) -> u64 {
    derive(seed ^ 0xA076_1D64_78BD_642F, lane)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
