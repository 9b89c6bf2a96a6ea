//! Seed derivation shared by the shuffle test and the synthetic generators.
//!
//! Stream `i` under master seed `s` is a ChaCha8 generator seeded (through
//! `SeedableRng::seed_from_u64`) with
//!
//! ```text
//! splitmix64(s ^ splitmix64(i))
//! ```
//!
//! where `splitmix64` is the standard finalizer with increment
//! `0x9E3779B97F4A7C15`. Streams are independent of evaluation order, so
//! replicates may run on any number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index))
}

pub fn stream_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master_seed, index))
}

/// In-place Fisher–Yates shuffle: for `i = n−1 … 1`, swap `i` with a
/// uniform `j ∈ [0, i]`.
pub fn fisher_yates<T, R: Rng + ?Sized>(values: &mut [T], rng: &mut R) {
    for i in (1..values.len()).rev() {
        let j = rng.random_range(0..=i);
        values.swap(i, j);
    }
}
