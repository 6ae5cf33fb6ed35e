//! Deterministic keyed streams: one independent ChaCha stream per
//! `(seed, key)`, so parallel work reproduces bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64, key: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    rng
}

/// Seed for a sub-experiment `key`, drawn from a stream disjoint from the
/// path streams (which use small keys).
pub fn subseed(seed: u64, key: u64) -> u64 {
    use rand::Rng;
    stream(seed, (1 << 63) | key).next_u64()
}
