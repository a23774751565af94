//! Deterministic seed derivation and per-trial random streams.
//!
//! Monte Carlo routines fan trials out to worker threads. To keep results
//! independent of scheduling, each trial reads from its own stream, keyed by
//! a counter-based hash of (master seed, trial index). Two runs with the same
//! master seed produce bitwise-identical estimates at any worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; bijective on u64 with full avalanche.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `master`, one word at a time.
///
/// Used to give every sweep cell and family member its own sub-seed without
/// any coordination between workers.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut state = mix64(master ^ 0x5bf0_3635_dcd4_4f1d);
    for &part in parts {
        state = mix64(state ^ mix64(part));
    }
    state
}

/// Independent stream for one (seed, counter) pair.
///
/// The pair is embedded in the ChaCha key, so streams for distinct counters
/// never share state and can be created in any order on any thread.
pub fn stream(seed: u64, counter: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&counter.to_le_bytes());
    key[16..24].copy_from_slice(&mix64(seed ^ mix64(counter)).to_le_bytes());
    key[24..32].copy_from_slice(&mix64(counter.wrapping_add(0x9e37_79b9)).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
