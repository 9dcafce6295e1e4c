//! Seed derivation. Every consumer of randomness gets its own ChaCha8
//! stream derived from the experiment seed, so adding a consumer never
//! perturbs the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_BATCH: u64 = 1;
pub const STREAM_CAUSAL: u64 = 2;
pub const STREAM_AGENT: u64 = 1 << 32;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for the `index`-th agent of an experiment.
pub fn agent_seed(seed: u64, index: usize) -> u64 {
    use rand::RngCore;
    stream(seed, STREAM_AGENT + index as u64).next_u64()
}
