//! Stochastic primitives: per-slot arrivals, per-receiver erasures, and
//! reproducible RNG streams.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The concrete generator used throughout the simulator.
pub type SimRng = ChaCha8Rng;

/// An independent, reproducible stream: same `(seed, stream)` gives the same
/// sequence bit for bit.
pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One slot of the Bernoulli(λ) arrival process: 1 with probability `rate`.
pub fn sample_arrival<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> u32 {
    debug_assert!((0.0..=1.0).contains(&rate));
    u32::from(rng.random_bool(rate))
}

/// Independent receptions for `receivers` receivers; `true` means received.
pub fn sample_reception<R: Rng + ?Sized>(erasure: f64, receivers: usize, rng: &mut R) -> Vec<bool> {
    let mut out = alloc::vec![false; receivers];
    fill_reception(erasure, &mut out, rng);
    out
}

/// In-place form of [`sample_reception`].
pub fn fill_reception<R: Rng + ?Sized>(erasure: f64, out: &mut [bool], rng: &mut R) {
    debug_assert!((0.0..1.0).contains(&erasure));
    for slot in out.iter_mut() {
        *slot = !rng.random_bool(erasure);
    }
}
