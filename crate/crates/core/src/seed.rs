//! Seed handling shared by every randomized step.
//!
//! All randomness flows from explicit `u64` seeds through [`ChaCha8Rng`], whose
//! output stream is stable across platforms and crate releases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Shuffle seed for a given epoch, derived from the run's base seed.
pub fn epoch_seed(base: u64, epoch: usize) -> u64 {
    splitmix64(base ^ splitmix64(epoch as u64))
}
