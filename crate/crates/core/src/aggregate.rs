//! Aggregated (distributional) sampling of astronomically large
//! classifier pools.
//!
//! Explicit sampling materializes one column per classifier and dies long
//! before the pool sizes this problem calls for (the interesting pools
//! have `2^Θ(m)` members). The aggregated representation stores, for a
//! block-structured prior, only the *error-count histogram* of each
//! dyadic block: within a block all classifiers carry the same prior
//! mass and their error counts are iid `Binomial(m_hard, μ_hard)`, so the
//! histogram is a sufficient statistic for every learner in this crate.
//!
//! Three regimes keep the cost bounded while preserving exactness where
//! it matters:
//!
//! * blocks with population `≤ 2^23` are sampled as an **exact
//!   multinomial** over the surviving error counts (sequential binomial
//!   splitting);
//! * in larger blocks, cells whose expected occupancy `λ = 2^{n-1} ·
//!   pmf(h)` is at least `10^4` form the deterministic **envelope**: their
//!   realized counts concentrate to within a fraction `~10^-2` of `λ`,
//!   and the envelope is reconstructed from closed-form block masses
//!   rather than stored;
//! * remaining cells with `λ ≥ 2^-60` are sampled as independent
//!   **Poisson flanks**; cells below `2^-60` are dropped (the chance any
//!   such cell is occupied anywhere in a run is below `2^-40`).
//!
//! For priors that are not block-structured (single-index tails), a
//! Pareto-frontier skip sampler materializes exactly the candidates that
//! any monotone selection rule could pick.

use crate::inference::{RowId, TableEntry};
use crate::prior::{dyadic, ClassifierPrior};
use crate::problem::ProblemSpec;
use crate::rng::{streams, StreamRng};
use crate::{Error, Result};
use rand_distr::{Binomial, Distribution, Poisson};

/// Largest block index sampled exactly (population `2^23 ≈ 8.4e6`).
pub const EXACT_BLOCK_MAX: u32 = 24;
/// `log2(10^4)`: expected-count threshold above which a cell joins the
/// deterministic envelope.
const ENV_LOG2_MIN: f64 = 13.287712379549449;
/// Cells with `log2 λ` below this are dropped.
const NEGLIGIBLE_LOG2: f64 = -60.0;
/// Expected number of zero-error classifiers the default block horizon
/// is sized to contain.
const HORIZON_TARGET: f64 = 1e3;
/// `ln(10^6)`: if the kept blocks hold fewer expected zero-error
/// classifiers than this, the truncation warning is raised.
const WARN_EXPECTED_ZEROS: f64 = 13.815510557964274;
/// Head size (indices `1..=2^12-1`) materialized exactly in singleton
/// mode.
const SINGLETON_HEAD_LOG2: u32 = 12;

/// One occupied `(block, error-count)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub block: u32,
    pub errors: u64,
    pub count: u64,
}

/// Histogram representation for block-structured priors.
#[derive(Debug, Clone)]
pub struct DyadicBody {
    /// Cells of exactly-sampled blocks, ascending `(block, errors)`.
    pub exact_cells: Vec<Cell>,
    /// Occupied Poisson flank cells of larger blocks, ascending
    /// `(block, errors)`.
    pub flank_cells: Vec<Cell>,
    /// Last exactly-sampled block (`min(n_max, 24)`).
    pub exact_block_max: u32,
}

/// A materialized tail candidate in singleton mode: the smallest sampled
/// index in some dyadic range achieving `errors`.
#[derive(Debug, Clone, Copy)]
pub struct TailCandidate {
    /// `log2` of the candidate's index.
    pub log2_index: f64,
    /// The index itself when it fits comfortably in a `u64`.
    pub exact_index: Option<u64>,
    pub errors: u64,
}

/// Pareto-frontier representation for singleton (non-block) priors.
#[derive(Debug, Clone)]
pub struct SingletonBody {
    /// Indices `1..=2^head_log2 - 1` are sampled exactly.
    pub head_log2: u32,
    /// `head_errors[j-1]` = error count of classifier `j`.
    pub head_errors: Vec<u64>,
    /// Strictly error-decreasing candidates beyond the head, ascending
    /// in index.
    pub frontier: Vec<TailCandidate>,
    /// The scan covered index ranges up to `2^scan_max_log2`.
    pub scan_max_log2: u32,
    /// True when the scan terminated because no later index can improve
    /// on the frontier (a zero-error candidate was found, or all smaller
    /// error counts have probability zero).
    pub frontier_complete: bool,
}

#[derive(Debug, Clone)]
pub enum SampleBody {
    Dyadic(DyadicBody),
    Singleton(SingletonBody),
}

/// A sample over an effectively unbounded classifier pool.
#[derive(Debug, Clone)]
pub struct AggregatedSample {
    pub spec: ProblemSpec,
    pub prior: ClassifierPrior,
    pub seed: u64,
    pub m: u64,
    /// Realized number of hard examples.
    pub m_hard: u64,
    /// Realized error count of the good classifier.
    pub good_error_count: u64,
    /// Blocks `1..=n_max` are represented (singleton mode: see
    /// [`SingletonBody::scan_max_log2`]).
    pub n_max: u32,
    /// Raised when the represented pool may fail to contain the first
    /// zero-training-error classifier with probability above `10^-6`.
    pub truncation_warning: bool,
    /// `log2 Binomial(m_hard, μ_hard)` pmf over error counts `0..=m_hard`.
    pub log2_pmf: Vec<f64>,
    pub body: SampleBody,
}

/// `log2` pmf of `Binomial(n, p)` over `0..=n`, exact at the degenerate
/// edges `p ∈ {0, 1}`.
fn log2_binomial_pmf_row(n: u64, p: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(n as usize + 1);
    for h in 0..=n {
        let mut v = crate::logspace::log2_binomial(n, h);
        if h > 0 {
            v += h as f64 * p.log2(); // -inf when p = 0
        }
        if h < n {
            v += (n - h) as f64 * (1.0 - p).log2(); // -inf when p = 1
        }
        row.push(v);
    }
    row
}

/// First index (from `lo`) of the unimodal row at or above `threshold`
/// on the non-decreasing side `[lo, peak]`; `None` if even the peak is
/// below.
fn rise_crossing(row: &[f64], lo: usize, peak: usize, threshold: f64) -> Option<usize> {
    if row[peak] < threshold {
        return None;
    }
    let (mut a, mut b) = (lo, peak); // invariant: row[b] >= threshold
    if row[a] >= threshold {
        return Some(a);
    }
    while b - a > 1 {
        let mid = (a + b) / 2;
        if row[mid] >= threshold {
            b = mid;
        } else {
            a = mid;
        }
    }
    Some(b)
}

/// Last index (up to `hi`) of the unimodal row at or above `threshold`
/// on the non-increasing side `[peak, hi]`; `None` if even the peak is
/// below.
fn fall_crossing(row: &[f64], peak: usize, hi: usize, threshold: f64) -> Option<usize> {
    if row[peak] < threshold {
        return None;
    }
    let (mut a, mut b) = (peak, hi); // invariant: row[a] >= threshold
    if row[b] >= threshold {
        return Some(b);
    }
    while b - a > 1 {
        let mid = (a + b) / 2;
        if row[mid] >= threshold {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(a)
}

/// `log2(2^n - 1)` without overflow.
fn log2_pow2_minus_one(n: u32) -> f64 {
    if n >= 53 {
        n as f64
    } else {
        (((1u64 << n) - 1) as f64).log2()
    }
}

/// Draw a scalable sample of the full classifier pool.
///
/// `n_max_override` pins the block horizon (dyadic priors) or the scan
/// horizon (singleton priors); `None` sizes it so the represented pool
/// holds about `10^3` expected zero-training-error classifiers. An
/// undersized horizon is reported through
/// [`AggregatedSample::truncation_warning`], never an error.
pub fn sample_aggregated(
    spec: &ProblemSpec,
    m: u64,
    prior: &ClassifierPrior,
    n_max_override: Option<u32>,
    seed: u64,
) -> Result<AggregatedSample> {
    if let ClassifierPrior::Finite { .. } = prior {
        return Err(Error::Unsupported(
            "finite priors enumerate a fixed pool; use the explicit sampler".into(),
        ));
    }
    if let Some(n) = n_max_override {
        if n == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
    }

    let mut hard_rng = StreamRng::from_seed_path(seed, &[streams::HARD]);
    let mut good_rng = StreamRng::from_seed_path(seed, &[streams::GOOD]);
    let m_hard = if m == 0 {
        0
    } else {
        Binomial::new(m, spec.p_hard())
            .unwrap()
            .sample(&mut hard_rng)
    };
    let good_error_count = if m == 0 {
        0
    } else {
        Binomial::new(m, spec.mu).unwrap().sample(&mut good_rng)
    };

    let log2_pmf = log2_binomial_pmf_row(m_hard, spec.mu_hard);

    if prior.is_block_structured() {
        sample_dyadic(
            spec,
            m,
            prior,
            n_max_override,
            seed,
            m_hard,
            good_error_count,
            log2_pmf,
        )
    } else {
        sample_singleton(
            spec,
            m,
            prior,
            n_max_override,
            seed,
            m_hard,
            good_error_count,
            log2_pmf,
        )
    }
}

#[allow(clippy::too_many_arguments)]
fn sample_dyadic(
    spec: &ProblemSpec,
    m: u64,
    prior: &ClassifierPrior,
    n_max_override: Option<u32>,
    seed: u64,
    m_hard: u64,
    good_error_count: u64,
    log2_pmf: Vec<f64>,
) -> Result<AggregatedSample> {
    let log2_pmf0 = log2_pmf[0];
    let n_cap = (4 * m).max(64).min(u32::MAX as u64) as u32;
    let n_max = match n_max_override {
        Some(n) => n,
        None => {
            if log2_pmf0.is_finite() {
                // Smallest n with (2^n - 1) pmf(0) > HORIZON_TARGET.
                let mut n = (HORIZON_TARGET.log2() - log2_pmf0).ceil().max(1.0) as u32;
                while n > 1 && log2_pow2_minus_one(n - 1) + log2_pmf0 > HORIZON_TARGET.log2() {
                    n -= 1;
                }
                while log2_pow2_minus_one(n) + log2_pmf0 <= HORIZON_TARGET.log2() && n < n_cap {
                    n += 1;
                }
                n.min(n_cap)
            } else {
                // No zero-error classifier can exist; fall back to the cap.
                n_cap
            }
        }
    };
    let truncation_warning = if log2_pmf0.is_finite() {
        log2_pow2_minus_one(n_max) + log2_pmf0 < WARN_EXPECTED_ZEROS.log2()
    } else {
        true
    };

    let peak = argmax(&log2_pmf);
    let hmax = m_hard as usize;

    // Exact multinomial histogram for small blocks.
    let mut exact_cells = Vec::new();
    let exact_block_max = n_max.min(EXACT_BLOCK_MAX);
    for n in 1..=exact_block_max {
        let pop = 1u64 << (n - 1);
        let cut = NEGLIGIBLE_LOG2 - (n - 1) as f64;
        let lo = rise_crossing(&log2_pmf, 0, peak, cut).expect("pmf peak below cutoff");
        let hi = fall_crossing(&log2_pmf, peak, hmax, cut).unwrap();
        // Conditional sequential binomial split over [lo, hi]; the mass
        // outside the window (< 2^-60 per member) is folded in by
        // normalization.
        let probs: Vec<f64> = (lo..=hi).map(|h| log2_pmf[h].exp2()).collect();
        let mut suffix = vec![0.0; probs.len() + 1];
        for i in (0..probs.len()).rev() {
            suffix[i] = suffix[i + 1] + probs[i];
        }
        let mut remaining = pop;
        for (i, h) in (lo..=hi).enumerate() {
            if remaining == 0 {
                break;
            }
            let count = if i == probs.len() - 1 {
                remaining
            } else {
                let p = (probs[i] / suffix[i]).clamp(0.0, 1.0);
                if p >= 1.0 {
                    remaining
                } else {
                    let mut rng =
                        StreamRng::from_seed_path(seed, &[streams::CELLS, n as u64, h as u64]);
                    Binomial::new(remaining, p).unwrap().sample(&mut rng)
                }
            };
            if count > 0 {
                exact_cells.push(Cell {
                    block: n,
                    errors: h as u64,
                    count,
                });
                remaining -= count;
            }
        }
    }

    // Poisson flanks of the large blocks.
    let mut flank_cells = Vec::new();
    for n in (EXACT_BLOCK_MAX + 1)..=n_max.max(EXACT_BLOCK_MAX) {
        if n > n_max {
            break;
        }
        let base = (n - 1) as f64;
        let cut_lo = NEGLIGIBLE_LOG2 - base;
        let cut_hi = ENV_LOG2_MIN - base;
        let a = match rise_crossing(&log2_pmf, 0, peak, cut_lo) {
            Some(a) => a,
            None => continue,
        };
        let b = fall_crossing(&log2_pmf, peak, hmax, cut_lo).unwrap();
        let (c, d) = match (
            rise_crossing(&log2_pmf, 0, peak, cut_hi),
            fall_crossing(&log2_pmf, peak, hmax, cut_hi),
        ) {
            (Some(c), Some(d)) => (c as i64, d as i64),
            _ => (i64::MAX, i64::MIN), // no envelope: one contiguous flank
        };
        let visit = |h: usize, out: &mut Vec<Cell>| {
            let lambda = (base + log2_pmf[h]).exp2();
            let mut rng = StreamRng::from_seed_path(seed, &[streams::CELLS, n as u64, h as u64]);
            let count = Poisson::new(lambda).unwrap().sample(&mut rng) as u64;
            if count > 0 {
                out.push(Cell {
                    block: n,
                    errors: h as u64,
                    count,
                });
            }
        };
        if c == i64::MAX {
            for h in a..=b {
                visit(h, &mut flank_cells);
            }
        } else {
            for h in a..(c as usize) {
                visit(h, &mut flank_cells);
            }
            for h in (d as usize + 1)..=b {
                visit(h, &mut flank_cells);
            }
        }
    }

    Ok(AggregatedSample {
        spec: *spec,
        prior: prior.clone(),
        seed,
        m,
        m_hard,
        good_error_count,
        n_max,
        truncation_warning,
        log2_pmf,
        body: SampleBody::Dyadic(DyadicBody {
            exact_cells,
            flank_cells,
            exact_block_max,
        }),
    })
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn sample_singleton(
    spec: &ProblemSpec,
    m: u64,
    prior: &ClassifierPrior,
    n_max_override: Option<u32>,
    seed: u64,
    m_hard: u64,
    good_error_count: u64,
    log2_pmf: Vec<f64>,
) -> Result<AggregatedSample> {
    // Exact head: indices 1..=2^12 - 1.
    let head_len = (1u64 << SINGLETON_HEAD_LOG2) - 1;
    let mut head_errors = Vec::with_capacity(head_len as usize);
    for j in 1..=head_len {
        let mut rng = StreamRng::from_seed_path(seed, &[streams::CELLS, j]);
        let e = if m_hard == 0 {
            0
        } else {
            Binomial::new(m_hard, spec.mu_hard)
                .unwrap()
                .sample(&mut rng)
        };
        head_errors.push(e);
    }
    let mut min_h = head_errors.iter().copied().min().unwrap_or(0);

    // Scan horizon: far enough past the expected first zero-error index.
    let log2_pmf0 = log2_pmf[0];
    let nu_cap = match n_max_override {
        Some(n) => n,
        None => {
            if log2_pmf0.is_finite() {
                ((-log2_pmf0).ceil() as u64 + 40).min(4 * m.max(16) + 64) as u32
            } else {
                SINGLETON_HEAD_LOG2 // nothing below m_hard errors exists
            }
        }
    };

    let mut frontier: Vec<TailCandidate> = Vec::new();
    let mut frontier_complete = min_h == 0;
    let mut scan_max_log2 = SINGLETON_HEAD_LOG2;
    let mut nu = SINGLETON_HEAD_LOG2;
    while !frontier_complete && nu <= nu_cap {
        scan_max_log2 = nu + 1;
        // Any error count with positive probability left to find?
        let reachable = (0..min_h).any(|h| log2_pmf[h as usize].is_finite());
        if !reachable {
            frontier_complete = true;
            break;
        }
        let mut found: Vec<TailCandidate> = Vec::new();
        for h in 0..min_h {
            let lp = log2_pmf[h as usize];
            let log2_lambda = nu as f64 + lp;
            if log2_lambda < NEGLIGIBLE_LOG2 {
                continue;
            }
            let mut rng = StreamRng::from_seed_path(seed, &[streams::FRONTIER, nu as u64, h]);
            let lambda = log2_lambda.exp2();
            // Occupancy count of this (range, error-count) cell: Poisson
            // below the envelope threshold, deterministic above it.
            let (count, log2_count) = if log2_lambda < ENV_LOG2_MIN {
                let c = Poisson::new(lambda).unwrap().sample(&mut rng) as u64;
                (c, (c as f64).log2())
            } else {
                (lambda.round().min(u64::MAX as f64) as u64, log2_lambda)
            };
            if count == 0 {
                continue;
            }
            // Smallest of `count` uniform positions in [2^nu, 2^{nu+1}):
            // inverse CDF of the minimum. The expm1 form stays accurate
            // when the count is astronomical and the offset collapses
            // toward zero.
            let u = rng.next_f64();
            let count_f = log2_count.exp2();
            let frac = (-((1.0 - u).ln() / count_f).exp_m1()).clamp(0.0, 1.0 - 1e-16);
            let log2_index = nu as f64 + frac.ln_1p() * crate::logspace::LOG2_E;
            let exact_index = if nu <= 62 {
                Some((1u64 << nu) + (frac * (1u64 << nu) as f64).floor() as u64)
            } else {
                None
            };
            found.push(TailCandidate {
                log2_index,
                exact_index,
                errors: h,
            });
        }
        // Keep only running-min improvements in index order.
        found.sort_by(|x, y| x.log2_index.partial_cmp(&y.log2_index).unwrap());
        for cand in found {
            if cand.errors < min_h {
                min_h = cand.errors;
                frontier.push(cand);
            }
        }
        if min_h == 0 {
            frontier_complete = true;
        }
        nu += 1;
    }

    Ok(AggregatedSample {
        spec: *spec,
        prior: prior.clone(),
        seed,
        m,
        m_hard,
        good_error_count,
        n_max: scan_max_log2,
        truncation_warning: !frontier_complete,
        log2_pmf,
        body: SampleBody::Singleton(SingletonBody {
            head_log2: SINGLETON_HEAD_LOG2,
            head_errors,
            frontier,
            scan_max_log2,
            frontier_complete,
        }),
    })
}

impl AggregatedSample {
    /// `log2` of the expected occupancy of cell `(block, errors)`.
    pub fn log2_expected_count(&self, block: u32, errors: u64) -> f64 {
        (block - 1) as f64 + self.log2_pmf[errors as usize]
    }

    /// Smallest block at which the `errors` cell joins the deterministic
    /// envelope, when one exists at or below the horizon.
    pub fn envelope_min_block(&self, errors: u64) -> Option<u32> {
        let lp = self.log2_pmf[errors as usize];
        if !lp.is_finite() {
            return None;
        }
        let mut n = ((ENV_LOG2_MIN + 1.0 - lp)
            .ceil()
            .max((EXACT_BLOCK_MAX + 1) as f64)) as u32;
        // Guard the ceil against boundary rounding.
        while n > EXACT_BLOCK_MAX + 1 && (n - 2) as f64 + lp >= ENV_LOG2_MIN {
            n -= 1;
        }
        while ((n - 1) as f64 + lp) < ENV_LOG2_MIN {
            n = n.checked_add(1)?;
            if n > self.n_max {
                return None;
            }
        }
        if n <= self.n_max {
            Some(n)
        } else {
            None
        }
    }

    /// Realized (or, in the envelope, deterministic) occupancy of a
    /// cell, as a float because envelope counts overflow `u64`.
    pub fn cell_count(&self, block: u32, errors: u64) -> f64 {
        let body = match &self.body {
            SampleBody::Dyadic(b) => b,
            SampleBody::Singleton(_) => panic!("cell_count is a dyadic-mode accessor"),
        };
        if let Some(n0) = self.envelope_min_block(errors) {
            if block >= n0 {
                return self.log2_expected_count(block, errors).exp2().round();
            }
        }
        let cells = if block <= body.exact_block_max {
            &body.exact_cells
        } else {
            &body.flank_cells
        };
        cells
            .iter()
            .find(|c| c.block == block && c.errors == errors)
            .map(|c| c.count as f64)
            .unwrap_or(0.0)
    }

    /// Smallest realized error count within each block `1..=n_blocks`
    /// (`u64::MAX` for blocks with no represented member).
    pub fn min_error_per_block(&self, n_blocks: u32) -> Vec<u64> {
        let body = match &self.body {
            SampleBody::Dyadic(b) => b,
            SampleBody::Singleton(_) => panic!("min_error_per_block is a dyadic-mode accessor"),
        };
        let mut mins = vec![u64::MAX; n_blocks as usize];
        for c in body.exact_cells.iter().chain(body.flank_cells.iter()) {
            if c.block <= n_blocks {
                let slot = &mut mins[c.block as usize - 1];
                *slot = (*slot).min(c.errors);
            }
        }
        for h in 0..=self.m_hard {
            if let Some(n0) = self.envelope_min_block(h) {
                for n in n0..=n_blocks.min(self.n_max) {
                    let slot = &mut mins[n as usize - 1];
                    *slot = (*slot).min(h);
                }
                // Envelope h is constant across n >= n0; one update per
                // block is enough and h ascends, so later h can't improve.
            }
        }
        mins
    }

    /// Rows for selectors and the posterior table, in ascending
    /// first-index order: the good classifier, then exact cells, flank
    /// cells, and envelope ranges.
    ///
    /// * `log2_unit_mass` — prior mass of one best-placed member (the
    ///   classifier a selector would report);
    /// * `log2_aggregate_mass` — total prior mass of the row's members,
    ///   with envelope rows carrying their closed-form expected mass.
    pub fn table_entries(&self) -> Vec<TableEntry> {
        let mut rows = Vec::new();
        let p0 = self.prior.log2_prior(0);
        rows.push(TableEntry {
            id: RowId::Classifier { index: 0 },
            errors: self.good_error_count,
            log2_aggregate_mass: p0,
            log2_unit_mass: p0,
        });
        match &self.body {
            SampleBody::Dyadic(body) => {
                for c in body.exact_cells.iter().chain(body.flank_cells.iter()) {
                    let unit = dyadic::log2_index_mass(c.block);
                    rows.push(TableEntry {
                        id: RowId::BlockCell { block: c.block },
                        errors: c.errors,
                        log2_aggregate_mass: unit + (c.count as f64).log2(),
                        log2_unit_mass: unit,
                    });
                }
                for h in 0..=self.m_hard {
                    if let Some(n0) = self.envelope_min_block(h) {
                        let mass =
                            dyadic::blocks_mass(n0, self.n_max).log2() + self.log2_pmf[h as usize];
                        rows.push(TableEntry {
                            id: RowId::BlockRange {
                                min_block: n0,
                                max_block: self.n_max,
                            },
                            errors: h,
                            log2_aggregate_mass: mass,
                            log2_unit_mass: dyadic::log2_index_mass(n0),
                        });
                    }
                }
            }
            SampleBody::Singleton(body) => {
                for (i, &e) in body.head_errors.iter().enumerate() {
                    let j = i as u64 + 1;
                    let p = self.prior.log2_prior(j);
                    rows.push(TableEntry {
                        id: RowId::Classifier { index: j },
                        errors: e,
                        log2_aggregate_mass: p,
                        log2_unit_mass: p,
                    });
                }
                for cand in &body.frontier {
                    let p = match cand.exact_index {
                        Some(j) => self.prior.log2_prior(j),
                        None => self.prior.log2_prior_from_log2_index(cand.log2_index),
                    };
                    rows.push(TableEntry {
                        id: RowId::TailIndex {
                            log2_index: cand.log2_index,
                        },
                        errors: cand.errors,
                        log2_aggregate_mass: p,
                        log2_unit_mass: p,
                    });
                }
            }
        }
        rows
    }

    /// Whether the sample realizes the bad-luck event: some
    /// zero-training-error classifier sits within the pool of size
    /// `k(m)` *and* the good classifier's empirical error is at least
    /// `μ - ε_m`.
    ///
    /// Partial blocks straddling the pool boundary are resolved by one
    /// auxiliary draw against the exact probability that any of the
    /// block's zero-error members lands below the boundary.
    pub fn zero_error_event(&self) -> bool {
        let eps = ProblemSpec::chernoff_slack(self.m.max(1));
        let good_ok = self.good_error_count as f64 >= self.m as f64 * (self.spec.mu - eps);
        if !good_ok {
            return false;
        }
        let pool = match self.spec.zero_error_pool_size(self.m.max(1)) {
            Ok(p) => p,
            Err(_) => return false, // mu_hard = 1: no zero-error classifier exists
        };
        match &self.body {
            SampleBody::Dyadic(body) => {
                let mut rng = StreamRng::from_seed_path(self.seed, &[streams::EVENT]);
                let zero_cells = body
                    .exact_cells
                    .iter()
                    .chain(body.flank_cells.iter())
                    .filter(|c| c.errors == 0)
                    .map(|c| (c.block, c.count as f64));
                let env_blocks = match self.envelope_min_block(0) {
                    Some(n0) => (n0..=self.n_max)
                        .map(|n| (n, self.log2_expected_count(n, 0).exp2()))
                        .collect(),
                    None => Vec::new(),
                };
                for (n, count) in zero_cells.chain(env_blocks) {
                    if (n as f64) <= pool.log2 {
                        return true; // block fully inside the pool
                    }
                    if ((n - 1) as f64) >= pool.log2 {
                        continue; // block fully outside
                    }
                    // Straddling block: fraction of members below k.
                    let frac = ((pool.log2 - (n - 1) as f64).exp2() - 1.0).clamp(0.0, 1.0);
                    let log_p_none = count * (-frac).ln_1p();
                    if rng.bernoulli(-log_p_none.exp_m1()) {
                        return true;
                    }
                }
                false
            }
            SampleBody::Singleton(body) => {
                let head_hit = body
                    .head_errors
                    .iter()
                    .enumerate()
                    .any(|(i, &e)| e == 0 && ((i + 1) as f64).log2() <= pool.log2);
                let tail_hit = body
                    .frontier
                    .iter()
                    .any(|c| c.errors == 0 && c.log2_index <= pool.log2);
                head_hit || tail_hit
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::ClassifierPrior;

    fn spec() -> ProblemSpec {
        ProblemSpec::new(0.2, 0.3, 0.5).unwrap()
    }

    #[test]
    fn rejects_finite_prior() {
        let prior = ClassifierPrior::finite_from_probs(&[0.5, 0.5]).unwrap();
        assert!(sample_aggregated(&spec(), 16, &prior, None, 1).is_err());
    }

    #[test]
    fn empty_sample_is_all_zero_cell() {
        let s = sample_aggregated(&spec(), 0, &ClassifierPrior::DyadicBlock, None, 3).unwrap();
        assert_eq!(s.m_hard, 0);
        assert_eq!(s.good_error_count, 0);
        match &s.body {
            SampleBody::Dyadic(b) => {
                for n in 1..=s.n_max.min(EXACT_BLOCK_MAX) {
                    let total: u64 = b
                        .exact_cells
                        .iter()
                        .filter(|c| c.block == n)
                        .map(|c| c.count)
                        .sum();
                    assert_eq!(total, 1u64 << (n - 1));
                    assert!(b
                        .exact_cells
                        .iter()
                        .filter(|c| c.block == n)
                        .all(|c| c.errors == 0));
                }
            }
            _ => panic!("expected dyadic body"),
        }
    }

    #[test]
    fn degenerate_mu_hard_one_single_cell() {
        let sp = ProblemSpec::new(0.2, 1.0, 1.0).unwrap();
        let s = sample_aggregated(&sp, 32, &ClassifierPrior::DyadicBlock, Some(8), 5).unwrap();
        assert!(s.truncation_warning);
        match &s.body {
            SampleBody::Dyadic(b) => {
                for n in 1..=8u32 {
                    let cells: Vec<_> = b.exact_cells.iter().filter(|c| c.block == n).collect();
                    assert_eq!(cells.len(), 1);
                    assert_eq!(cells[0].errors, s.m_hard);
                    assert_eq!(cells[0].count, 1u64 << (n - 1));
                }
            }
            _ => panic!("expected dyadic body"),
        }
    }

    #[test]
    fn exact_blocks_conserve_population() {
        let s = sample_aggregated(&spec(), 256, &ClassifierPrior::DyadicBlock, None, 11).unwrap();
        match &s.body {
            SampleBody::Dyadic(b) => {
                for n in 1..=b.exact_block_max {
                    let total: u64 = b
                        .exact_cells
                        .iter()
                        .filter(|c| c.block == n)
                        .map(|c| c.count)
                        .sum();
                    assert_eq!(total, 1u64 << (n - 1), "block {n}");
                }
            }
            _ => panic!("expected dyadic body"),
        }
    }

    #[test]
    fn horizon_targets_thousand_zero_error_members() {
        let s = sample_aggregated(&spec(), 256, &ClassifierPrior::DyadicBlock, None, 11).unwrap();
        assert!(!s.truncation_warning);
        let expected_zero = log2_pow2_minus_one(s.n_max) + s.log2_pmf[0];
        assert!(expected_zero > HORIZON_TARGET.log2());
        let one_less = log2_pow2_minus_one(s.n_max - 1) + s.log2_pmf[0];
        assert!(one_less <= HORIZON_TARGET.log2());
    }

    #[test]
    fn tiny_override_raises_truncation_warning() {
        let s =
            sample_aggregated(&spec(), 256, &ClassifierPrior::DyadicBlock, Some(4), 11).unwrap();
        assert_eq!(s.n_max, 4);
        assert!(s.truncation_warning);
    }

    #[test]
    fn prior_mass_is_conserved() {
        // Realized aggregate masses must reproduce the closed-form prior
        // mass of the represented pool to high accuracy.
        let s = sample_aggregated(&spec(), 2048, &ClassifierPrior::DyadicBlock, None, 99).unwrap();
        let rows = s.table_entries();
        let total = crate::logspace::log2_sum(
            &rows
                .iter()
                .map(|r| r.log2_aggregate_mass)
                .collect::<Vec<_>>(),
        );
        let expect = (0.5 + dyadic::blocks_mass(1, s.n_max)).log2();
        assert!(
            (total - expect).abs() < 1e-3,
            "realized mass 2^{total} vs closed form 2^{expect}"
        );
    }

    #[test]
    fn envelope_counts_match_flank_boundary() {
        let s = sample_aggregated(&spec(), 2048, &ClassifierPrior::DyadicBlock, None, 7).unwrap();
        // At the first envelope block of some h, expected count >= 1e4 and
        // the block below is either exact or flank territory.
        let h = s.m_hard / 2;
        if let Some(n0) = s.envelope_min_block(h) {
            assert!(s.log2_expected_count(n0, h) >= ENV_LOG2_MIN - 1e-9);
            if n0 > EXACT_BLOCK_MAX + 1 {
                assert!(s.log2_expected_count(n0 - 1, h) < ENV_LOG2_MIN);
            }
        }
    }

    #[test]
    fn flank_cells_below_envelope_threshold() {
        let s = sample_aggregated(&spec(), 2048, &ClassifierPrior::DyadicBlock, None, 42).unwrap();
        match &s.body {
            SampleBody::Dyadic(b) => {
                for c in &b.flank_cells {
                    let l = s.log2_expected_count(c.block, c.errors);
                    assert!(l < ENV_LOG2_MIN && l >= NEGLIGIBLE_LOG2);
                }
            }
            _ => panic!("expected dyadic body"),
        }
    }

    #[test]
    fn table_rows_cover_every_occupied_source() {
        let s = sample_aggregated(&spec(), 512, &ClassifierPrior::DyadicBlock, None, 13).unwrap();
        let rows = s.table_entries();
        assert!(matches!(rows[0].id, RowId::Classifier { index: 0 }));
        let n_cells = match &s.body {
            SampleBody::Dyadic(b) => b.exact_cells.len() + b.flank_cells.len(),
            _ => unreachable!(),
        };
        let n_env = (0..=s.m_hard)
            .filter(|&h| s.envelope_min_block(h).is_some())
            .count();
        assert_eq!(rows.len(), 1 + n_cells + n_env);
    }

    #[test]
    fn singleton_head_and_frontier() {
        let prior = ClassifierPrior::polynomial(2).unwrap();
        let s = sample_aggregated(&spec(), 64, &prior, None, 21).unwrap();
        match &s.body {
            SampleBody::Singleton(b) => {
                assert_eq!(b.head_errors.len(), (1 << SINGLETON_HEAD_LOG2) - 1);
                assert!(
                    b.frontier_complete,
                    "scan should reach a zero-error candidate"
                );
                let head_min = b.head_errors.iter().copied().min().unwrap();
                let mut last_err = head_min;
                let mut last_idx = 0.0_f64;
                for c in &b.frontier {
                    assert!(c.errors < last_err, "frontier must strictly improve");
                    assert!(c.log2_index >= last_idx);
                    assert!(c.log2_index >= b.head_log2 as f64);
                    last_err = c.errors;
                    last_idx = c.log2_index;
                }
                // A complete scan above a nonzero head minimum must end
                // at a zero-error candidate.
                if head_min > 0 {
                    assert_eq!(b.frontier.last().unwrap().errors, 0);
                }
            }
            _ => panic!("expected singleton body"),
        }
    }

    #[test]
    fn singleton_zero_error_event_matches_frontier() {
        let prior = ClassifierPrior::polynomial(2).unwrap();
        let s = sample_aggregated(&spec(), 64, &prior, None, 22).unwrap();
        // The event decomposes into the two visible conditions.
        let eps = ProblemSpec::chernoff_slack(64);
        let good_ok = s.good_error_count as f64 >= 64.0 * (0.2 - eps);
        let pool = s.spec.zero_error_pool_size(64).unwrap();
        let manual = good_ok
            && match &s.body {
                SampleBody::Singleton(b) => {
                    b.frontier
                        .iter()
                        .any(|c| c.errors == 0 && c.log2_index <= pool.log2)
                        || b.head_errors
                            .iter()
                            .enumerate()
                            .any(|(i, &e)| e == 0 && ((i + 1) as f64).log2() <= pool.log2)
                }
                _ => unreachable!(),
            };
        assert_eq!(s.zero_error_event(), manual);
    }

    #[test]
    fn reproducible_across_calls() {
        let a = sample_aggregated(&spec(), 512, &ClassifierPrior::DyadicBlock, None, 77).unwrap();
        let b = sample_aggregated(&spec(), 512, &ClassifierPrior::DyadicBlock, None, 77).unwrap();
        assert_eq!(a.m_hard, b.m_hard);
        assert_eq!(a.good_error_count, b.good_error_count);
        match (&a.body, &b.body) {
            (SampleBody::Dyadic(x), SampleBody::Dyadic(y)) => {
                assert_eq!(x.exact_cells, y.exact_cells);
                assert_eq!(x.flank_cells, y.flank_cells);
            }
            _ => panic!("expected dyadic bodies"),
        }
    }

    #[test]
    fn min_error_per_block_consistent_with_cells() {
        let s = sample_aggregated(&spec(), 128, &ClassifierPrior::DyadicBlock, None, 31).unwrap();
        let mins = s.min_error_per_block(s.n_max.min(6));
        match &s.body {
            SampleBody::Dyadic(b) => {
                for (i, &mn) in mins.iter().enumerate() {
                    let n = i as u32 + 1;
                    let direct = b
                        .exact_cells
                        .iter()
                        .filter(|c| c.block == n)
                        .map(|c| c.errors)
                        .min()
                        .unwrap_or(u64::MAX);
                    assert_eq!(mn, direct, "block {n}");
                }
            }
            _ => panic!("expected dyadic body"),
        }
    }
}
