//! Deterministic substream seeding.
//!
//! Every random draw in the crate comes from a ChaCha8 generator whose seed
//! is derived from a 64-bit master seed plus a list of stream tags (purpose,
//! trial index, relay index, ...). Derivation chains SplitMix64 over the
//! tags, so any (master, tags) pair maps to a fixed substream regardless of
//! how many draws other substreams have consumed. This makes populations,
//! selections, and sweep cells reproducible independently of evaluation
//! order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tag: per-trial population generation.
pub const STREAM_POPULATION: u64 = 0x01;
/// Stream tag: per-relay attribute draws inside a population.
pub const STREAM_RELAY: u64 = 0x02;
/// Stream tag: uniform-arbitrary (B-1 style) subset draws.
pub const STREAM_UNIFORM_DRAW: u64 = 0x03;
/// Stream tag: per-destination coefficient re-draws in the orchestrator.
pub const STREAM_ORCHESTRATE: u64 = 0x04;

/// SplitMix64 output function (Steele, Lea, Flood's standard constants).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a substream seed from a master seed and a list of stream tags.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &tag in tags {
        state = splitmix64(state ^ splitmix64(tag));
    }
    state
}

/// A ChaCha8 generator seeded from the derived substream seed.
pub fn substream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tags))
}
