//! Deterministic seed derivation.
//!
//! Every stochastic routine takes an explicit generator; batch experiments
//! derive one independent stream per task from `(base_seed, task_index)` via a
//! counter-based SplitMix64 expansion. Adding tasks never perturbs the streams
//! of existing ones, and replays are bit-identical for a fixed crate version.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step; the standard finalizer used to expand small seeds.
fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    *state = z;
}

fn expand(words: [u64; 2]) -> [u8; 32] {
    let mut key = [0u8; 32];
    let mut state = words[0] ^ 0x6A09_E667_F3BC_C908;
    // fold the stream index in before expansion
    state = state.wrapping_add(words[1].wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut s = state;
    for chunk in key.chunks_exact_mut(8) {
        splitmix64(&mut s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    key
}

/// Independent stream `index` of the experiment seeded by `base_seed`.
pub fn stream(base_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(expand([base_seed, index]))
}

/// Derive a single task seed from `(base, index)` without constructing a
/// generator; used where a downstream API takes a plain `u64` seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut s = base ^ 0x9E37_79B9_7F4A_7C15;
    splitmix64(&mut s);
    let mut t = s ^ index.wrapping_mul(0xD134_2543_DE82_EF95);
    splitmix64(&mut t);
    t
}

/// Sub-stream derivation for structured tasks (e.g. per-seed, per-component).
pub fn substream(base_seed: u64, index: u64, component: u64) -> ChaCha8Rng {
    let mut s = base_seed ^ 0x243F_6A88_85A3_08D3;
    splitmix64(&mut s);
    let folded = s ^ index.rotate_left(17);
    ChaCha8Rng::from_seed(expand([folded, component]))
}
