//! Deterministic random sub-streams.
//!
//! Every `(seed, lane, chunk)` triple is hashed with SplitMix64 into the seed
//! of its own xoshiro256++ generator. Workers never share state, so results
//! cannot depend on scheduling.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Identifies the generator construction in output provenance.
pub const GENERATOR: &str = "xoshiro256++ seeded by splitmix64(seed, mode, chunk)";

/// One SplitMix64 step.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a seed with two labels into a fresh 64-bit seed.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut s = seed;
    let x = splitmix64(&mut s);
    let mut s = x ^ a.wrapping_mul(0xd6e8_feb8_6659_fd93);
    let y = splitmix64(&mut s);
    let mut s = y ^ b.wrapping_mul(0xa076_1d64_78bd_642f);
    splitmix64(&mut s)
}

/// Generator for `(seed, lane, chunk)`.
pub fn substream(seed: u64, lane: u64, chunk: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(derive_seed(seed, lane, chunk))
}

/// Uniform double in `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
