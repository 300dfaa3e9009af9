//! Deterministic seed derivation.
//!
//! All randomness in the crate flows from one base seed through named
//! derivation, so every stage is reproducible independently of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derive a child seed from a base seed, a stage name, and an index.
///
/// Uses an FNV-1a mix over the stage bytes followed by a splitmix64
/// finalizer, so derived streams for different stages never collide in
/// practice and the mapping is stable across platforms.
pub fn derive_seed(base: u64, stage: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in stage.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    splitmix64(base ^ h ^ index.wrapping_mul(0x9e3779b97f4a7c15))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Seeded ChaCha8 stream for a named stage.
pub fn stage_rng(base: u64, stage: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, stage, index))
}
