//! The synthetic learning problem and its explicit (per-classifier) sampler.
//!
//! The distribution is parameterized by [`ProblemSpec`]: labels are fair
//! coins; an example is *hard* with probability `p_hard = μ'/μ_hard`; on a
//! hard example every bad classifier independently disagrees with the
//! label with probability `μ_hard`, while on easy examples bad classifiers
//! always agree. The designated good classifier `c_0` disagrees with the
//! label with probability `μ` regardless of hardness. Consequently
//! `e_D(c_0) = μ` and `e_D(c_j) = p_hard · μ_hard = μ'` for every `j ≥ 1`.
//!
//! [`sample_explicit`] materializes one column per classifier and is
//! bit-reproducible across platforms (every draw is a fixed-point
//! threshold comparison on raw 64-bit generator output). The scalable
//! counterpart lives in [`crate::aggregate`].

use crate::inference::binary_entropy;
use crate::rng::{streams, StreamRng};
use crate::{Error, Result};

/// Parameters `(μ, μ', μ_hard)` of the synthetic distribution.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProblemSpec {
    /// True error rate of the good classifier `c_0`.
    pub mu: f64,
    /// True error rate of every bad classifier.
    pub mu_prime: f64,
    /// Per-hard-example disagreement rate of bad classifiers.
    pub mu_hard: f64,
}

impl ProblemSpec {
    /// Validated constructor: requires `0 < μ ≤ μ' ≤ 1`, `μ < 1`,
    /// `0.5 ≤ μ_hard ≤ 1`, and `μ' ≤ μ_hard` (so `p_hard ≤ 1`).
    ///
    /// `μ' = 1` is admitted (every example hard with certain flips when
    /// `μ_hard = 1`): degenerate but well-defined.
    pub fn new(mu: f64, mu_prime: f64, mu_hard: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidParameter(format!("mu={mu} outside (0,1)")));
        }
        if !(mu_prime >= mu && mu_prime <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "mu_prime={mu_prime} outside [mu, 1]"
            )));
        }
        if !(0.5..=1.0).contains(&mu_hard) {
            return Err(Error::InvalidParameter(format!(
                "mu_hard={mu_hard} outside [0.5, 1]"
            )));
        }
        if mu_prime > mu_hard {
            return Err(Error::InvalidParameter(format!(
                "p_hard = mu_prime/mu_hard = {} exceeds 1",
                mu_prime / mu_hard
            )));
        }
        Ok(ProblemSpec {
            mu,
            mu_prime,
            mu_hard,
        })
    }

    /// Probability that an example is hard: `μ' / μ_hard`.
    pub fn p_hard(&self) -> f64 {
        self.mu_prime / self.mu_hard
    }

    /// Whether the parameters sit in the regime `μ' < H(μ)/2` where
    /// codelength-penalized selection provably prefers bad classifiers
    /// for all large sample sizes.
    pub fn inconsistency_regime(&self) -> bool {
        self.mu_prime < binary_entropy(self.mu) / 2.0
    }

    /// Closed-form true error of classifier `j` (no sampling).
    pub fn true_error(&self, j: u64) -> f64 {
        if j == 0 {
            self.mu
        } else {
            self.mu_prime
        }
    }

    /// Concentration slack `ε_m = m^{-1/4}` used by the pool-size and
    /// zero-error-event bookkeeping.
    pub fn chernoff_slack(m: u64) -> f64 {
        assert!(m >= 1, "slack undefined for empty samples");
        (m as f64).powf(-0.25)
    }

    /// Size of the classifier pool that contains a zero-training-error
    /// bad classifier with overwhelming probability:
    /// `k(m) = ceil( 2 m ε_m² / (1-μ_hard)^{m (p_hard + ε_m)} )`.
    ///
    /// Computed in the log domain; the plain integer is returned only
    /// when it fits in a `u64`.
    pub fn zero_error_pool_size(&self, m: u64) -> Result<PoolSize> {
        if m < 1 {
            return Err(Error::InvalidParameter("pool size needs m >= 1".into()));
        }
        if self.mu_hard >= 1.0 {
            return Err(Error::InvalidParameter(
                "pool size diverges at mu_hard = 1 (bad classifiers never achieve zero error)"
                    .into(),
            ));
        }
        let mf = m as f64;
        let eps = Self::chernoff_slack(m);
        // log2 of 2 m eps^2 = 2 sqrt(m), minus the tail exponent.
        let log2 = 1.0 + 0.5 * mf.log2() - mf * (self.p_hard() + eps) * (1.0 - self.mu_hard).log2();
        let exact = if log2 < 63.0 {
            Some((log2.exp2()).ceil() as u64)
        } else {
            None
        };
        Ok(PoolSize {
            log2,
            ceil_log2: log2.ceil() as u64,
            exact,
        })
    }
}

/// Result of [`ProblemSpec::zero_error_pool_size`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolSize {
    /// `log2` of the (un-rounded) pool size.
    pub log2: f64,
    /// `ceil(log2 k)`, always available.
    pub ceil_log2: u64,
    /// The rounded-up pool size itself when it fits in 64 bits.
    pub exact: Option<u64>,
}

/// Dense bit matrix, rows = classifiers, columns = hard examples.
#[derive(Debug, Clone)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = r * self.words_per_row + c / 64;
        let bit = 1u64 << (c % 64);
        if v {
            self.data[w] |= bit;
        } else {
            self.data[w] &= !bit;
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.words_per_row + c / 64] >> (c % 64)) & 1 == 1
    }

    /// Popcount of one row.
    pub fn count_ones(&self, r: usize) -> u64 {
        let start = r * self.words_per_row;
        self.data[start..start + self.words_per_row]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum()
    }

    /// Swap two whole rows (used by exchangeability checks).
    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.words_per_row {
            self.data
                .swap(a * self.words_per_row + k, b * self.words_per_row + k);
        }
    }
}

/// A fully materialized sample: one error bit per (classifier, example).
///
/// Bad classifiers never err on easy examples, so their bits are stored
/// only for hard columns; `hard_positions` maps hard-column index back to
/// the sample position.
#[derive(Debug, Clone)]
pub struct ExplicitSample {
    pub spec: ProblemSpec,
    pub m: usize,
    /// Number of materialized bad classifiers (indices `1..=k_bad`).
    pub k_bad: usize,
    pub labels: Vec<bool>,
    pub hard_flags: Vec<bool>,
    /// Bit `i` set where the good classifier disagrees with `labels[i]`.
    pub good_error_bits: Vec<bool>,
    /// Sample position of each hard column.
    pub hard_positions: Vec<usize>,
    /// `k_bad × m_hard`; bit set where classifier `j+1` disagrees with the
    /// label on that hard example.
    pub bad_bits: BitMatrix,
    /// True for batches produced by [`fresh_test_batch`]; learners refuse
    /// to fit on test data.
    pub test_data: bool,
}

impl ExplicitSample {
    /// Number of hard examples.
    pub fn m_hard(&self) -> usize {
        self.hard_positions.len()
    }

    /// Training errors of classifier `j` (0 = good classifier).
    pub fn error_count(&self, j: u64) -> u64 {
        if j == 0 {
            self.good_error_bits.iter().filter(|&&b| b).count() as u64
        } else {
            assert!(j as usize <= self.k_bad, "classifier index out of range");
            self.bad_bits.count_ones(j as usize - 1)
        }
    }

    /// Error counts for all classifiers `0..=k_bad`.
    pub fn error_counts(&self) -> Vec<u64> {
        (0..=self.k_bad as u64)
            .map(|j| self.error_count(j))
            .collect()
    }

    /// Whether bad classifier `j ≥ 1` disagrees with the label on the
    /// given hard column.
    pub fn bad_disagrees(&self, j: u64, hard_col: usize) -> bool {
        assert!(j >= 1 && j as usize <= self.k_bad);
        self.bad_bits.get(j as usize - 1, hard_col)
    }

    /// Smallest error count within each dyadic block `1..=n_blocks`
    /// (blocks truncated to the materialized pool).
    pub fn min_error_per_block(&self, n_blocks: u32) -> Vec<u64> {
        let counts = self.error_counts();
        (1..=n_blocks)
            .map(|n| {
                let lo = 1usize << (n - 1);
                let hi = ((1usize << n) - 1).min(self.k_bad);
                (lo..=hi).map(|j| counts[j]).min().unwrap_or(u64::MAX)
            })
            .collect()
    }

    /// Swap the stored rows of two bad classifiers (exchangeability
    /// experiments only).
    pub fn swap_bad_rows(&mut self, j1: u64, j2: u64) {
        assert!(j1 >= 1 && j2 >= 1);
        self.bad_bits.swap_rows(j1 as usize - 1, j2 as usize - 1);
    }
}

/// Draw a fully materialized sample with `k_bad` bad classifiers.
///
/// `m = 0` yields the empty sample. Deterministic and bit-identical
/// across platforms for a given `(spec, m, k_bad, seed)`.
pub fn sample_explicit(spec: &ProblemSpec, m: usize, k_bad: usize, seed: u64) -> ExplicitSample {
    assert!(k_bad >= 1, "at least one bad classifier is required");
    let mut label_rng = StreamRng::from_seed_path(seed, &[streams::LABELS]);
    let mut hard_rng = StreamRng::from_seed_path(seed, &[streams::HARD]);
    let mut good_rng = StreamRng::from_seed_path(seed, &[streams::GOOD]);

    let p_hard = spec.p_hard();
    let mut labels = Vec::with_capacity(m);
    let mut hard_flags = Vec::with_capacity(m);
    let mut good_error_bits = Vec::with_capacity(m);
    let mut hard_positions = Vec::new();
    for i in 0..m {
        labels.push(label_rng.bernoulli(0.5));
        let hard = hard_rng.bernoulli(p_hard);
        hard_flags.push(hard);
        if hard {
            hard_positions.push(i);
        }
        good_error_bits.push(good_rng.bernoulli(spec.mu));
    }

    let m_hard = hard_positions.len();
    let mut bad_bits = BitMatrix::new(k_bad, m_hard);
    let bad_root = StreamRng::from_seed_path(seed, &[streams::BAD]);
    for j in 0..k_bad {
        let mut rng = bad_root.child(j as u64 + 1);
        for col in 0..m_hard {
            if rng.bernoulli(spec.mu_hard) {
                bad_bits.set(j, col, true);
            }
        }
    }

    ExplicitSample {
        spec: *spec,
        m,
        k_bad,
        labels,
        hard_flags,
        good_error_bits,
        hard_positions,
        bad_bits,
        test_data: false,
    }
}

/// Fresh evaluation batch: distributionally identical to
/// [`sample_explicit`] but flagged so it is never fed to a fitting path.
pub fn fresh_test_batch(
    spec: &ProblemSpec,
    m_test: usize,
    k_bad: usize,
    seed: u64,
) -> ExplicitSample {
    let mut s = sample_explicit(spec, m_test, k_bad, seed);
    s.test_data = true;
    s
}

/// A single fresh example in distributional form (enough to evaluate any
/// predictor that treats bad classifiers exchangeably).
#[derive(Debug, Clone, Copy)]
pub struct TestPoint {
    pub label: bool,
    pub hard: bool,
    /// Whether the good classifier disagrees with the label here.
    pub good_wrong: bool,
}

/// Draw one test point from the given stream.
pub fn sample_test_point(spec: &ProblemSpec, rng: &mut StreamRng) -> TestPoint {
    TestPoint {
        label: rng.bernoulli(0.5),
        hard: rng.bernoulli(spec.p_hard()),
        good_wrong: rng.bernoulli(spec.mu),
    }
}
