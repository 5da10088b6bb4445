//! Seed derivation. Every consumer of randomness draws from its own ChaCha8
//! stream keyed by `(root seed, stream id)`, so results do not depend on the
//! order in which independent pieces of work run.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// The generator for stream `stream` under `root`.
pub fn stream(root: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream);
    rng
}

/// Uniform in `[0, 1)` with 53 random bits.
pub fn unit(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in `[lo, hi]`.
pub fn uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    (lo + (hi - lo) * unit(rng)).clamp(lo.min(hi), lo.max(hi))
}

/// Uniform integer in `lo..=hi`.
pub fn int_in(rng: &mut Rng, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

pub fn coin(rng: &mut Rng, p: f64) -> bool {
    unit(rng) < p
}
