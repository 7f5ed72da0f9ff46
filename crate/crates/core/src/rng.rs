//! Seeded randomness.
//!
//! Every random decision in the crate (split shuffles, SMOTE draws, bootstrap
//! samples, feature subsets, synthetic data) uses xoshiro256** seeded through
//! SplitMix64, so outputs are reproducible for a given seed. Independent
//! per-tree and per-class streams come from [`stream`].

use rand::{RngCore, SeedableRng};
pub use rand_xoshiro::{SplitMix64, Xoshiro256StarStar as Rng};

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Generator for stream `id` under `seed`: the seed is xored with the first
/// SplitMix64 output of `id`.
pub fn stream(seed: u64, id: u64) -> Rng {
    seeded(seed ^ SplitMix64::seed_from_u64(id).next_u64())
}
