//! Splittable deterministic random streams.
//!
//! Every stochastic routine in this crate derives an independent ChaCha8
//! stream from (seed, lane, step) counters, so results are bitwise
//! reproducible and independent of how work is distributed across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// ChaCha8 stream keyed by the full (seed, lane, step) triple.
pub fn stream(seed: u64, lane: u64, step: u64) -> ChaCha8Rng {
    let mut state = seed ^ 0xA076_1D64_78BD_642F;
    let a = splitmix64(&mut state);
    state ^= lane.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    let b = splitmix64(&mut state);
    state ^= step.wrapping_mul(0x8EBC_6AF0_9C88_C6E3);
    let c = splitmix64(&mut state);
    let d = splitmix64(&mut state);

    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&a.to_le_bytes());
    key[8..16].copy_from_slice(&b.to_le_bytes());
    key[16..24].copy_from_slice(&c.to_le_bytes());
    key[24..32].copy_from_slice(&d.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
