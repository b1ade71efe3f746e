//! Counter-based pseudo-random generator with explicit stream derivation.
//!
//! Every source of randomness in this crate is a [`StreamRng`], a
//! SplitMix64-style generator addressed by a `(seed, path)` pair. The
//! *path* is a list of `u64` tags (experiment id, trial index, stream
//! role, block index, ...) folded into the seed with a strong 64-bit
//! mixer, so that
//!
//! * two distinct paths yield statistically independent streams,
//! * any stream can be re-opened at any time without replaying others,
//! * results are bit-for-bit reproducible across platforms for all
//!   integer-threshold draws ([`StreamRng::next_u64`],
//!   [`StreamRng::bernoulli`]).
//!
//! The generator implements [`rand::RngCore`] so it can drive samplers
//! from the `rand` ecosystem.

use rand::RngCore;

/// Golden-ratio increment used by the SplitMix64 state transition.
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output mixer (xor-shift / multiply finalizer).
#[inline]
fn mix(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// Fold one path tag into a stream key.
#[inline]
fn fold(key: u64, tag: u64) -> u64 {
    mix(key.wrapping_add(GAMMA) ^ mix(tag))
}

/// Well-known stream roles used by the samplers and learners.
///
/// Keeping the tags in one place guarantees that distinct consumers of a
/// trial's randomness never collide.
pub mod streams {
    /// Training-label coin flips.
    pub const LABELS: u64 = 1;
    /// Hard/easy mixture indicator per training example.
    pub const HARD: u64 = 2;
    /// Error indicator stream of the designated good classifier.
    pub const GOOD: u64 = 3;
    /// Error matrix of the bad classifiers (explicit mode).
    pub const BAD: u64 = 4;
    /// Aggregated-mode error-count draws, sub-keyed by block and cell.
    pub const CELLS: u64 = 5;
    /// Aggregated-mode tail-frontier draws, sub-keyed by dyadic range.
    pub const FRONTIER: u64 = 6;
    /// Fresh test points for generalization-error estimation.
    pub const TEST: u64 = 7;
    /// Per-test-point randomness inside the Bayes predictor.
    pub const BAYES: u64 = 8;
    /// Sequential-prediction bookkeeping randomness.
    pub const SEQUENTIAL: u64 = 9;
    /// Tie-resolution draws for the zero-error pool event on partial blocks.
    pub const EVENT: u64 = 10;
}

/// A splittable counter-based generator.
///
/// The `key` field freezes the stream identity assigned at construction;
/// `state` is the advancing counter. Children derived with
/// [`StreamRng::child`] depend only on the key, never on how much of the
/// parent stream has been consumed.
#[derive(Debug, Clone)]
pub struct StreamRng {
    key: u64,
    state: u64,
}

impl StreamRng {
    /// Open the stream addressed by `seed` and a derivation `path`.
    pub fn from_seed_path(seed: u64, path: &[u64]) -> Self {
        let key = path.iter().fold(mix(seed), |k, &tag| fold(k, tag));
        StreamRng { key, state: key }
    }

    /// Derive a child stream by extending this stream's path with `tag`.
    ///
    /// Independent of the parent's consumption state.
    pub fn child(&self, tag: u64) -> Self {
        let key = fold(self.key, tag);
        StreamRng { key, state: key }
    }

    /// Derive a child stream by extending this stream's path with `path`.
    pub fn descend(&self, path: &[u64]) -> Self {
        let key = path.iter().fold(self.key, |k, &tag| fold(k, tag));
        StreamRng { key, state: key }
    }

    /// Next raw 64-bit output.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw via a fixed-point 64-bit threshold comparison.
    ///
    /// Bit-exact across platforms: `p` is mapped to
    /// `threshold = p * 2^64` (exact for any finite `p in (0,1)` because
    /// the product only shifts the exponent), and the draw succeeds iff
    /// the next raw output is below the threshold.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p >= 1.0 {
            return true;
        }
        if p <= 0.0 {
            return false;
        }
        let threshold = (p * 18_446_744_073_709_551_616.0) as u64;
        self.next_u64() < threshold
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        (StreamRng::next_u64(self) >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        StreamRng::next_u64(self)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let word = StreamRng::next_u64(self).to_le_bytes();
            chunk.copy_from_slice(&word[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}
