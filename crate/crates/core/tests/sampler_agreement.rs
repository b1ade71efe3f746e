//! Distributional agreement between the two samplers.
//!
//! The explicit sampler materializes every classifier's feature bits; the
//! aggregated sampler draws only per-block error-count histograms. Both
//! target the same population law, so any statistic computable from both
//! must match in distribution. The explicit path is simple enough to audit
//! by eye, which makes it the oracle.

use occamlab::aggregate::sample_aggregated;
use occamlab::inference::RowId;
use occamlab::learners::{explicit_table_entries, select, Algorithm};
use occamlab::prior::{ClassifierPrior, ThetaPrior};
use occamlab::problem::{sample_explicit, ProblemSpec};
use occamlab::stats::chi_square_two_sample;

const M: usize = 32;
const N_BLOCKS: u32 = 12;
const K_BAD: usize = (1 << N_BLOCKS) - 1; // blocks 1..=12 exactly
const TRIALS: u64 = 200;
const P_FLOOR: f64 = 0.01;

fn spec() -> ProblemSpec {
    ProblemSpec::new(0.2, 0.3, 0.5).unwrap()
}

fn histogram(values: impl IntoIterator<Item = u64>) -> Vec<(u64, u64)> {
    let mut map = std::collections::BTreeMap::new();
    for v in values {
        *map.entry(v).or_insert(0u64) += 1;
    }
    map.into_iter().collect()
}

/// Category code for a (block, min-error) pair so the per-block minima can
/// be pooled into a single categorical sample.
fn block_min_code(block: u32, min_err: u64) -> u64 {
    (block as u64) * 100 + min_err.min(99)
}

#[test]
fn hard_count_distributions_match() {
    let s = spec();
    let prior = ClassifierPrior::DyadicBlock;
    let explicit: Vec<u64> = (0..TRIALS)
        .map(|t| sample_explicit(&s, M, K_BAD, 1_000 + t).m_hard() as u64)
        .collect();
    let aggregated: Vec<u64> = (0..TRIALS)
        .map(|t| {
            sample_aggregated(&s, M as u64, &prior, Some(N_BLOCKS), 2_000 + t)
                .unwrap()
                .m_hard
        })
        .collect();
    let r = chi_square_two_sample(&histogram(explicit), &histogram(aggregated)).unwrap();
    assert!(
        r.p_value > P_FLOOR,
        "hard-count distributions differ: chi2={} df={} p={}",
        r.statistic,
        r.degrees_of_freedom,
        r.p_value
    );
}

#[test]
fn per_block_minimum_error_distributions_match() {
    let s = spec();
    let prior = ClassifierPrior::DyadicBlock;
    let mut explicit = Vec::new();
    let mut aggregated = Vec::new();
    for t in 0..TRIALS {
        let e = sample_explicit(&s, M, K_BAD, 1_000 + t);
        for (i, &min) in e.min_error_per_block(N_BLOCKS).iter().enumerate() {
            explicit.push(block_min_code(i as u32 + 1, min));
        }
        let a = sample_aggregated(&s, M as u64, &prior, Some(N_BLOCKS), 2_000 + t).unwrap();
        for (i, &min) in a.min_error_per_block(N_BLOCKS).iter().enumerate() {
            aggregated.push(block_min_code(i as u32 + 1, min));
        }
    }
    let r = chi_square_two_sample(&histogram(explicit), &histogram(aggregated)).unwrap();
    assert!(
        r.p_value > P_FLOOR,
        "per-block minimum-error distributions differ: chi2={} df={} p={}",
        r.statistic,
        r.degrees_of_freedom,
        r.p_value
    );
}

#[test]
fn selection_outcome_distributions_match() {
    let s = spec();
    let prior = ClassifierPrior::DyadicBlock;
    let theta = ThetaPrior::uniform();
    // Category: whether the two-part-code winner is the good classifier.
    let mut explicit = Vec::new();
    let mut aggregated = Vec::new();
    for t in 0..TRIALS {
        let e = sample_explicit(&s, M, K_BAD, 1_000 + t);
        let entries = explicit_table_entries(&e, &prior).unwrap();
        let win = select(Algorithm::Mdl, &entries, M as u64, &theta).unwrap();
        explicit.push(u64::from(win.id != RowId::Classifier { index: 0 }));

        let a = sample_aggregated(&s, M as u64, &prior, Some(N_BLOCKS), 2_000 + t).unwrap();
        let win = select(Algorithm::Mdl, &a.table_entries(), M as u64, &theta).unwrap();
        aggregated.push(u64::from(win.id != RowId::Classifier { index: 0 }));
    }
    let r = chi_square_two_sample(&histogram(explicit), &histogram(aggregated)).unwrap();
    assert!(
        r.p_value > P_FLOOR,
        "selection-outcome distributions differ: chi2={} df={} p={}",
        r.statistic,
        r.degrees_of_freedom,
        r.p_value
    );
}
