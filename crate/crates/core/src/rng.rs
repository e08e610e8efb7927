//! Seeding and random-number conventions.
//!
//! All randomness in the crate flows through ChaCha8 (`rand_chacha`), a
//! portable counter-based stream cipher whose output is stable across
//! platforms and releases. Sub-seeds (per repeat, per sample, per kernel
//! pair) are derived with a SplitMix64 chain so that independent units of
//! work get decorrelated streams and adding work items never perturbs
//! existing ones.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One SplitMix64 step: advance by the 64-bit golden ratio and finalize.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a sub-seed from a master seed and a sequence of stream labels,
/// e.g. `mix(seed, &[repeat])` or `mix(seed, &[iteration, sample])`.
pub fn mix(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ p))
}

/// The crate-wide PRNG, seeded deterministically.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
