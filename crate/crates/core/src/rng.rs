//! Reproducible random streams.
//!
//! Trace `i` of a batch seeded with `seed` draws from
//! `ChaCha8Rng::seed_from_u64(seed ^ i)`, so any trace can be regenerated
//! on its own and batches give the same answers however they are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TraceRng = ChaCha8Rng;

pub fn trace_rng(seed: u64, i: u64) -> TraceRng {
    ChaCha8Rng::seed_from_u64(seed ^ i)
}
