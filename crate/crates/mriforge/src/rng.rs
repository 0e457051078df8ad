//! Deterministic random-number substreams.
//!
//! Dataset builds must produce byte-identical output no matter how many
//! worker threads run, so worker state can never flow through a shared RNG.
//! Instead every unit of work derives its own stream: the master seed and a
//! handful of identifying values (scan id, axis, slice index, attempt
//! round) are folded through a SplitMix64-style mixer into a 64-bit seed,
//! which then keys a ChaCha8 stream. The mixer is pure arithmetic — no
//! platform-dependent hashers — so streams are stable across machines and
//! versions.

use rand_chacha::rand_core::SeedableRng;

/// The stream cipher RNG used everywhere randomness is needed. ChaCha8 is
/// fast, seedable, and its output sequence is stable across platforms.
pub type StreamRng = rand_chacha::ChaCha8Rng;

/// Accumulates identifying values into a substream seed.
///
/// ```
/// use mriforge::rng::SeedMixer;
/// let rng = SeedMixer::new(42).str("scan07").u64(3).rng();
/// # let _ = rng;
/// ```
#[derive(Debug, Clone, Copy)]
pub struct SeedMixer(u64);

impl SeedMixer {
    pub fn new(master_seed: u64) -> Self {
        SeedMixer(splitmix64(master_seed ^ 0x9e37_79b9_7f4a_7c15))
    }

    /// Folds one 64-bit value into the state.
    pub fn u64(self, v: u64) -> Self {
        SeedMixer(splitmix64(self.0 ^ v))
    }

    /// Folds a string into the state, 8 bytes at a time, length included so
    /// `"ab" + "c"` and `"a" + "bc"` land in different streams.
    pub fn str(self, s: &str) -> Self {
        let mut m = self.u64(s.len() as u64);
        for chunk in s.as_bytes().chunks(8) {
            let mut word = [0u8; 8];
            word[..chunk.len()].copy_from_slice(chunk);
            m = m.u64(u64::from_le_bytes(word));
        }
        m
    }

    /// The derived 64-bit seed.
    pub fn finish(self) -> u64 {
        splitmix64(self.0)
    }

    /// A ChaCha8 stream keyed by the derived seed.
    pub fn rng(self) -> StreamRng {
        StreamRng::seed_from_u64(self.finish())
    }
}

/// SplitMix64 finalizer: a well-mixed bijection on u64.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
