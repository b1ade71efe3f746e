//! The Bayes predictor: posterior-weighted label voting, in batch and
//! sequential form.
//!
//! Unlike the selection rules in [`crate::learners`], the Bayes act
//! averages over the whole posterior. Given a test input — that is, the
//! vector of classifier outputs — the posterior-predictive probability
//! of label 1 is the posterior-weighted vote
//!
//! ```text
//! p1 = Σ_rows w · (output == 1 ? 1 - θ̄ : θ̄)
//! ```
//!
//! with `θ̄` the row's posterior-mean noise rate, and the prediction is
//! 1 exactly when `p1 ≥ 1/2` (ties resolve to 1).
//!
//! The batch evaluator scores this predictor on fresh test points. Easy
//! points cost `O(1)` each: every bad classifier outputs the label, so
//! the vote depends only on two precomputed posterior aggregates. On
//! hard points the handful of posterior-material rows receive exact
//! binomial output splits; rows whose combined posterior weight is
//! below `2^-45` of the maximum — and the astronomically populated
//! envelope rows — vote with the exact expected split `μ_hard`, an
//! approximation whose effect on the vote is below the `2^-45`
//! threshold itself.

use crate::aggregate::{AggregatedSample, SampleBody};
use crate::inference::{EvidenceTable, RowId};
use crate::prior::{dyadic, ClassifierPrior, ThetaPrior};
use crate::problem::{sample_test_point, ExplicitSample, ProblemSpec};
use crate::rng::{streams, StreamRng};
use crate::stats::{wilson_interval, Z_95};
use crate::{Error, Result};
use rand_distr::{Binomial, Distribution};

/// Rows whose posterior weight falls below `max · 2^REL_CUTOFF` vote
/// fractionally instead of receiving exact binomial splits.
const REL_CUTOFF: f64 = -45.0;

/// Posterior-predictive probability that the label is 1, given each
/// row's output bit (parallel to `table.rows`).
pub fn posterior_vote(table: &EvidenceTable, outputs: &[bool]) -> f64 {
    assert_eq!(outputs.len(), table.rows.len());
    let mut p1 = 0.0;
    for (row, &o) in table.rows.iter().zip(outputs) {
        let w = row.log2_posterior.exp2();
        p1 += w * if o {
            1.0 - row.posterior_theta
        } else {
            row.posterior_theta
        };
    }
    p1
}

/// The Bayes act: predict 1 exactly when the vote reaches 1/2.
pub fn predict_from_vote(p1: f64) -> bool {
    p1 >= 0.5
}

/// Convenience wrapper: vote, then act.
pub fn bayes_predict(table: &EvidenceTable, outputs: &[bool]) -> bool {
    predict_from_vote(posterior_vote(table, outputs))
}

/// Exact error count of the Bayes predictor on an explicit test batch.
///
/// The posterior `table` must come from training rows (`Classifier`
/// ids only); the batch must be flagged as test data.
pub fn bayes_errors_on_batch(table: &EvidenceTable, batch: &ExplicitSample) -> Result<u64> {
    if !batch.test_data {
        return Err(Error::InvalidParameter(
            "generalization must be measured on a fresh test batch".into(),
        ));
    }
    let indices: Vec<u64> = table
        .rows
        .iter()
        .map(|r| match r.id {
            RowId::Classifier { index } => Ok(index),
            _ => Err(Error::Unsupported(
                "explicit batch evaluation needs per-classifier rows".into(),
            )),
        })
        .collect::<Result<_>>()?;
    if let Some(&mx) = indices.iter().max() {
        if mx > batch.k_bad as u64 {
            return Err(Error::InvalidParameter(format!(
                "table references classifier {mx} beyond the batch pool"
            )));
        }
    }

    let mut hard_col = 0usize;
    let mut errors = 0u64;
    let mut outputs = vec![false; indices.len()];
    for i in 0..batch.m {
        let y = batch.labels[i];
        let hard = batch.hard_flags[i];
        for (slot, &j) in outputs.iter_mut().zip(&indices) {
            let wrong = if j == 0 {
                batch.good_error_bits[i]
            } else if hard {
                batch.bad_disagrees(j, hard_col)
            } else {
                false
            };
            *slot = y ^ wrong;
        }
        if bayes_predict(table, &outputs) != y {
            errors += 1;
        }
        if hard {
            hard_col += 1;
        }
    }
    Ok(errors)
}

/// Generalization report of the Bayes predictor on simulated fresh
/// points.
#[derive(Debug, Clone, Copy)]
pub struct BayesBatchReport {
    pub m_test: u64,
    pub errors: u64,
    pub empirical_error: f64,
    /// 95% Wilson interval for the true error.
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub hard_count: u64,
    pub hard_errors: u64,
    pub easy_count: u64,
    pub easy_errors: u64,
}

/// Monte-Carlo generalization error of the Bayes predictor fitted on an
/// aggregated (dyadic) sample.
pub fn bayes_generalization_aggregated(
    sample: &AggregatedSample,
    theta: &ThetaPrior,
    m_test: u64,
    seed: u64,
) -> Result<BayesBatchReport> {
    if m_test == 0 {
        return Err(Error::InvalidParameter("m_test must be positive".into()));
    }
    if matches!(sample.body, SampleBody::Singleton(_)) {
        return Err(Error::Unsupported(
            "the frontier representation keeps only selection candidates; \
             posterior averaging needs the dyadic histogram"
                .into(),
        ));
    }
    let table = EvidenceTable::build(sample.m, theta, &sample.table_entries());
    let spec = sample.spec;

    // Posterior aggregates over the bad rows (everything except c_0).
    let mut w_good = 0.0;
    let mut theta_good = 0.5;
    let mut w_bad = 0.0;
    let mut a_bad = 0.0; // Σ w θ̄ over bad rows
    let mut max_bad_log2 = f64::NEG_INFINITY;
    for row in &table.rows {
        let w = row.log2_posterior.exp2();
        if matches!(row.id, RowId::Classifier { index: 0 }) {
            w_good = w;
            theta_good = row.posterior_theta;
        } else {
            w_bad += w;
            a_bad += w * row.posterior_theta;
            max_bad_log2 = max_bad_log2.max(row.log2_posterior);
        }
    }

    // Material rows: big enough posterior weight and an integer count.
    struct Material {
        count: u64,
        w: f64,
        theta: f64,
    }
    let mut material = Vec::new();
    let mut w_frac = w_bad;
    let mut a_frac = a_bad;
    for row in &table.rows {
        if matches!(row.id, RowId::Classifier { index: 0 }) {
            continue;
        }
        if row.log2_posterior < max_bad_log2 + REL_CUTOFF {
            continue;
        }
        if matches!(row.id, RowId::BlockRange { .. }) {
            continue; // envelope: astronomically many members, exact split is the mean
        }
        let count = (row.log2_aggregate_mass - row.log2_unit_mass)
            .exp2()
            .round();
        if count < 1.0 || count > 2f64.powi(40) {
            continue;
        }
        let w = row.log2_posterior.exp2();
        material.push(Material {
            count: count as u64,
            w,
            theta: row.posterior_theta,
        });
        w_frac -= w;
        a_frac -= w * row.posterior_theta;
    }
    w_frac = w_frac.max(0.0);
    a_frac = a_frac.max(0.0);

    let mut point_rng = StreamRng::from_seed_path(seed, &[streams::TEST]);
    let mut split_rng = StreamRng::from_seed_path(seed, &[streams::BAYES]);

    let mut errors = 0u64;
    let mut hard_count = 0u64;
    let mut hard_errors = 0u64;
    for _ in 0..m_test {
        let pt = sample_test_point(&spec, &mut point_rng);
        let y = pt.label;
        // Vote toward the true label; flip at the end if y = 0.
        let good_vote = if pt.good_wrong {
            theta_good
        } else {
            1.0 - theta_good
        };
        let p_true = if pt.hard {
            hard_count += 1;
            let mut acc = w_good * good_vote;
            // Fractional pool: fraction mu_hard outputs the wrong label.
            acc += (w_frac - a_frac) * (1.0 - spec.mu_hard) + a_frac * spec.mu_hard;
            for row in &material {
                let wrong = Binomial::new(row.count, spec.mu_hard)
                    .unwrap()
                    .sample(&mut split_rng) as f64;
                let right_frac = (row.count as f64 - wrong) / row.count as f64;
                acc += row.w * (right_frac * (1.0 - row.theta) + (1.0 - right_frac) * row.theta);
            }
            acc
        } else {
            // All bad classifiers output the label.
            w_good * good_vote + (w_bad - a_bad)
        };
        let p1 = if y { p_true } else { 1.0 - p_true };
        let predicted = predict_from_vote(p1);
        if predicted != y {
            errors += 1;
            if pt.hard {
                hard_errors += 1;
            }
        }
    }

    let (ci_lo, ci_hi) = wilson_interval(errors, m_test, Z_95);
    Ok(BayesBatchReport {
        m_test,
        errors,
        empirical_error: errors as f64 / m_test as f64,
        ci_lo,
        ci_hi,
        hard_count,
        hard_errors,
        easy_count: m_test - hard_count,
        easy_errors: errors - hard_errors,
    })
}

/// Transcript of one sequential-prediction run.
#[derive(Debug, Clone)]
pub struct SequentialReport {
    pub m: u64,
    /// Online mistakes of the Bayes act.
    pub mistakes: u64,
    /// Total accumulated `-log2` predictive probability, in bits.
    pub log_loss_bits: f64,
    /// Per-step losses (sums to `log_loss_bits`).
    pub per_step_log_loss: Vec<f64>,
    /// `-log2` of the joint label probability, recomputed from the final
    /// posterior state in one pass.
    pub joint_evidence_bits: f64,
    /// `|Σ per-step - joint|`: the chain rule makes this pure float
    /// noise.
    pub chain_rule_gap: f64,
}

/// Number of trailing exact blocks in the sequential engine
/// (populations up to `2^13`).
const SEQ_EXACT_BLOCK_MAX: u32 = 14;

/// Sequential Bayes prediction over a simulated stream of the synthetic
/// problem under the dyadic block prior.
///
/// Each step reveals the classifier outputs, scores the posterior vote,
/// then reveals the label and performs the exact posterior update.
/// Blocks with population `≤ 2^13` evolve by exact binomial splits of
/// their member counts; deeper blocks evolve their posterior mass
/// density in closed form (the expectation split *is* the binomial
/// error-count law, so no per-member state is needed).
pub fn sequential_bayes_aggregated(
    spec: &ProblemSpec,
    m: u64,
    theta: &ThetaPrior,
    n_max_override: Option<u32>,
    seed: u64,
) -> Result<SequentialReport> {
    // Horizon sized like the batch sampler, from the expected number of
    // hard examples.
    let n_max = match n_max_override {
        Some(n) if n >= SEQ_EXACT_BLOCK_MAX + 1 => n,
        Some(n) => {
            return Err(Error::InvalidParameter(format!(
                "sequential horizon must be at least {}, got {n}",
                SEQ_EXACT_BLOCK_MAX + 1
            )))
        }
        None => {
            let log2_pmf0 = m as f64 * spec.p_hard() * (1.0 - spec.mu_hard).log2();
            let target = 1000f64.log2();
            let n = if log2_pmf0.is_finite() {
                (target - log2_pmf0)
                    .ceil()
                    .max((SEQ_EXACT_BLOCK_MAX + 1) as f64)
            } else {
                (4 * m).max(64) as f64
            };
            n.min((4 * m).max(64) as f64) as u32
        }
    };

    let root = StreamRng::from_seed_path(seed, &[streams::SEQUENTIAL]);
    let mut label_rng = root.child(streams::LABELS);
    let mut hard_rng = root.child(streams::HARD);
    let mut good_rng = root.child(streams::GOOD);
    let mut split_rng = root.child(streams::CELLS);

    // Good-classifier state.
    let mut w_good = 0.5;
    let mut a_good = 0u64;
    // Exact blocks: per block, posterior mass and member count per error
    // count (dense over a).
    let exact_max = n_max.min(SEQ_EXACT_BLOCK_MAX);
    let mut exact: Vec<Vec<(u64, f64)>> = (1..=exact_max)
        .map(|n| vec![(1u64 << (n - 1), dyadic::block_mass(n))])
        .collect();
    // Envelope: fractional posterior mass density over error counts.
    let mut env: Vec<f64> = if n_max > exact_max {
        vec![dyadic::blocks_mass(exact_max + 1, n_max)]
    } else {
        vec![]
    };

    let mut total =
        w_good + exact.iter().flatten().map(|&(_, w)| w).sum::<f64>() + env.iter().sum::<f64>();
    let mut log2_scale = 0.0; // accumulated rescaling, in bits
    let t0_bits = total.log2() + log2_scale;

    let mut mistakes = 0u64;
    let mut per_step = Vec::with_capacity(m as usize);

    for i in 0..m {
        let theta_row = |a: u64| theta.posterior_mean(a, i);
        let y = label_rng.bernoulli(0.5);
        let hard = hard_rng.bernoulli(spec.p_hard());
        let good_wrong = good_rng.bernoulli(spec.mu);

        // Advance every group one step; the new total yields both the
        // predictive probability of the true label and the next state.
        let tg = theta_row(a_good);
        let new_w_good = w_good * if good_wrong { tg } else { 1.0 - tg };

        let mut new_exact: Vec<Vec<(u64, f64)>> = Vec::with_capacity(exact.len());
        for states in &exact {
            let mut next = vec![(0u64, 0.0); states.len() + usize::from(hard)];
            for (a, &(count, w)) in states.iter().enumerate() {
                if count == 0 || w == 0.0 {
                    continue;
                }
                let th = theta_row(a as u64);
                if hard {
                    let wrong = Binomial::new(count, spec.mu_hard)
                        .unwrap()
                        .sample(&mut split_rng);
                    let per = w / count as f64;
                    next[a].0 += count - wrong;
                    next[a].1 += per * (count - wrong) as f64 * (1.0 - th);
                    next[a + 1].0 += wrong;
                    next[a + 1].1 += per * wrong as f64 * th;
                } else {
                    next[a].0 += count;
                    next[a].1 += w * (1.0 - th);
                }
            }
            new_exact.push(next);
        }

        let mut new_env = vec![0.0; env.len() + usize::from(hard)];
        for (a, &w) in env.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let th = theta_row(a as u64);
            if hard {
                new_env[a] += w * (1.0 - spec.mu_hard) * (1.0 - th);
                new_env[a + 1] += w * spec.mu_hard * th;
            } else {
                new_env[a] += w * (1.0 - th);
            }
        }

        let new_total = new_w_good
            + new_exact.iter().flatten().map(|&(_, w)| w).sum::<f64>()
            + new_env.iter().sum::<f64>();

        // Predictive probability of the revealed label, then the act.
        let p_true = new_total / total;
        let p1 = if y { p_true } else { 1.0 - p_true };
        if predict_from_vote(p1) != y {
            mistakes += 1;
        }
        per_step.push(-p_true.log2());

        w_good = new_w_good;
        if good_wrong {
            a_good += 1;
        }
        exact = new_exact;
        env = new_env;
        total = new_total;

        if total < 1e-100 {
            let f = total.recip();
            w_good *= f;
            for states in &mut exact {
                for s in states.iter_mut() {
                    s.1 *= f;
                }
            }
            for w in &mut env {
                *w *= f;
            }
            log2_scale += total.log2();
            total = 1.0;
        }
    }

    let log_loss_bits: f64 = per_step.iter().sum();
    let joint = -(total.log2() + log2_scale - t0_bits);
    Ok(SequentialReport {
        m,
        mistakes,
        log_loss_bits,
        per_step_log_loss: per_step,
        joint_evidence_bits: joint,
        chain_rule_gap: (log_loss_bits - joint).abs(),
    })
}

/// Sequential Bayes prediction over an arbitrary finite expert set.
///
/// `outputs(c, i)` is expert `c`'s prediction at step `i`; `log2_masses`
/// are the experts' prior weights (any finite subnormalization is
/// handled by conditioning on the enumerated set).
pub fn sequential_bayes_stream(
    labels: &[bool],
    outputs: impl Fn(usize, usize) -> bool,
    log2_masses: &[f64],
    theta: &ThetaPrior,
) -> Result<SequentialReport> {
    let mut w: Vec<f64> = log2_masses.iter().map(|&l| l.exp2()).collect();
    let mut a = vec![0u64; w.len()];
    let mut total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter(
            "prior assigns no mass to the expert set".into(),
        ));
    }
    let mut log2_scale = 0.0;
    let t0_bits = total.log2();

    let mut mistakes = 0u64;
    let mut per_step = Vec::with_capacity(labels.len());
    for (i, &y) in labels.iter().enumerate() {
        let mut new_total = 0.0;
        for (j, wj) in w.iter_mut().enumerate() {
            let wrong = outputs(j, i) != y;
            let th = theta.posterior_mean(a[j], i as u64);
            *wj *= if wrong { th } else { 1.0 - th };
            if wrong {
                a[j] += 1;
            }
            new_total += *wj;
        }
        let p_true = new_total / total;
        let p1 = if y { p_true } else { 1.0 - p_true };
        if predict_from_vote(p1) != y {
            mistakes += 1;
        }
        per_step.push(-p_true.log2());
        total = new_total;
        if total < 1e-100 {
            let f = total.recip();
            for wj in &mut w {
                *wj *= f;
            }
            log2_scale += total.log2();
            total = 1.0;
        }
    }

    let log_loss_bits: f64 = per_step.iter().sum();
    let joint = -(total.log2() + log2_scale - t0_bits);
    Ok(SequentialReport {
        m: labels.len() as u64,
        mistakes,
        log_loss_bits,
        per_step_log_loss: per_step,
        joint_evidence_bits: joint,
        chain_rule_gap: (log_loss_bits - joint).abs(),
    })
}

/// Sequential Bayes prediction over an explicitly materialized sample
/// under an arbitrary prior (one posterior weight per classifier).
///
/// The stream is the sample's own example order.
pub fn sequential_bayes_explicit(
    sample: &ExplicitSample,
    prior: &ClassifierPrior,
    theta: &ThetaPrior,
) -> Result<SequentialReport> {
    if sample.test_data {
        return Err(Error::InvalidParameter(
            "sequential prediction consumes a training stream, not test data".into(),
        ));
    }
    let limit = match prior.max_index() {
        Some(mx) => mx.min(sample.k_bad as u64),
        None => sample.k_bad as u64,
    };
    let masses: Vec<f64> = (0..=limit).map(|j| prior.log2_prior(j)).collect();
    // Column index of each step among the hard examples.
    let mut hard_prefix = vec![0usize; sample.m];
    let mut acc = 0usize;
    for i in 0..sample.m {
        hard_prefix[i] = acc;
        if sample.hard_flags[i] {
            acc += 1;
        }
    }
    let outputs = |j: usize, i: usize| {
        let wrong = if j == 0 {
            sample.good_error_bits[i]
        } else if sample.hard_flags[i] {
            sample.bad_disagrees(j as u64, hard_prefix[i])
        } else {
            false
        };
        sample.labels[i] ^ wrong
    };
    sequential_bayes_stream(&sample.labels, outputs, &masses, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::TableEntry;
    use crate::problem::{fresh_test_batch, sample_explicit};

    fn spec() -> ProblemSpec {
        ProblemSpec::new(0.2, 0.3, 0.5).unwrap()
    }

    #[test]
    fn tie_at_half_predicts_one() {
        let entries = vec![
            TableEntry {
                id: RowId::Classifier { index: 0 },
                errors: 0,
                log2_aggregate_mass: -1.0,
                log2_unit_mass: -1.0,
            },
            TableEntry {
                id: RowId::Classifier { index: 1 },
                errors: 0,
                log2_aggregate_mass: -1.0,
                log2_unit_mass: -1.0,
            },
        ];
        // With a uniform θ prior and no data, θ̄ = 1/2 and every row's
        // predictive is exactly 1/2 no matter what it outputs: the vote
        // is a tie for all output patterns and the act outputs 1.
        let table = EvidenceTable::build(0, &ThetaPrior::uniform(), &entries);
        let p1 = posterior_vote(&table, &[true, false]);
        assert!((p1 - 0.5).abs() < 1e-12);
        assert!(bayes_predict(&table, &[true, false]));
        assert!(bayes_predict(&table, &[false, false]));

        // With θ̄ < 1/2 the outputs matter: two equally weighted rows that
        // disagree still vote exactly 1/2 (tie ⇒ output 1), while agreement
        // on 0 pushes the vote to θ̄ < 1/2 and the act outputs 0.
        let sharp = ThetaPrior::point_mass(0.2).unwrap();
        let table = EvidenceTable::build(0, &sharp, &entries);
        let p1 = posterior_vote(&table, &[true, false]);
        assert!((p1 - 0.5).abs() < 1e-12);
        assert!(bayes_predict(&table, &[true, false]));
        assert!(!bayes_predict(&table, &[false, false]));
        let p0 = posterior_vote(&table, &[false, false]);
        assert!((p0 - 0.2).abs() < 1e-12);
    }

    #[test]
    fn posterior_vote_tracks_dominant_row() {
        // One row holds essentially all posterior mass with low noise:
        // the vote follows its output.
        let entries = vec![
            TableEntry {
                id: RowId::Classifier { index: 0 },
                errors: 0,
                log2_aggregate_mass: -1.0,
                log2_unit_mass: -1.0,
            },
            TableEntry {
                id: RowId::Classifier { index: 1 },
                errors: 40,
                log2_aggregate_mass: -1.0,
                log2_unit_mass: -1.0,
            },
        ];
        let table = EvidenceTable::build(40, &ThetaPrior::uniform(), &entries);
        assert!(bayes_predict(&table, &[true, false]));
        assert!(!bayes_predict(&table, &[false, true]));
    }

    #[test]
    fn batch_eval_requires_test_flag_and_known_rows() {
        let sp = spec();
        let train = sample_explicit(&sp, 16, 3, 5);
        let entries =
            crate::learners::explicit_table_entries(&train, &ClassifierPrior::DyadicBlock).unwrap();
        let table = EvidenceTable::build(16, &ThetaPrior::uniform(), &entries);
        assert!(bayes_errors_on_batch(&table, &train).is_err());
        let batch = fresh_test_batch(&sp, 64, 3, 6);
        let errs = bayes_errors_on_batch(&table, &batch).unwrap();
        assert!(errs <= 64);
    }

    #[test]
    fn aggregated_batch_report_shape() {
        let sp = spec();
        let s =
            crate::aggregate::sample_aggregated(&sp, 128, &ClassifierPrior::DyadicBlock, None, 33)
                .unwrap();
        let rep = bayes_generalization_aggregated(&s, &ThetaPrior::uniform(), 2000, 34).unwrap();
        assert_eq!(rep.m_test, 2000);
        assert_eq!(rep.hard_count + rep.easy_count, 2000);
        assert_eq!(rep.hard_errors + rep.easy_errors, rep.errors);
        assert!(rep.ci_lo <= rep.empirical_error && rep.empirical_error <= rep.ci_hi);
        // Monte-Carlo sanity: the hard fraction tracks p_hard.
        let frac = rep.hard_count as f64 / 2000.0;
        assert!((frac - 0.6).abs() < 0.05, "hard fraction {frac}");
    }

    #[test]
    fn singleton_posterior_averaging_unsupported() {
        let sp = spec();
        let prior = ClassifierPrior::polynomial(2).unwrap();
        let s = crate::aggregate::sample_aggregated(&sp, 64, &prior, None, 9).unwrap();
        assert!(matches!(
            bayes_generalization_aggregated(&s, &ThetaPrior::uniform(), 100, 1),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn sequential_chain_rule_is_exact_explicit() {
        let sp = spec();
        let sample = sample_explicit(&sp, 200, 63, 17);
        let rep = sequential_bayes_explicit(
            &sample,
            &ClassifierPrior::DyadicBlock,
            &ThetaPrior::uniform(),
        )
        .unwrap();
        assert!(rep.chain_rule_gap < 1e-6, "gap {}", rep.chain_rule_gap);
        assert_eq!(rep.per_step_log_loss.len(), 200);
        // A mistake step costs at least one bit, so mistakes ≤ log-loss.
        assert!((rep.mistakes as f64) <= rep.log_loss_bits + 1e-9);
    }

    #[test]
    fn sequential_chain_rule_is_exact_aggregated() {
        let sp = spec();
        let rep = sequential_bayes_aggregated(&sp, 300, &ThetaPrior::uniform(), None, 23).unwrap();
        assert!(rep.chain_rule_gap < 1e-6, "gap {}", rep.chain_rule_gap);
        assert!((rep.mistakes as f64) <= rep.log_loss_bits + 1e-9);
        assert!(rep.log_loss_bits > 0.0);
    }

    #[test]
    fn sequential_rejects_test_data() {
        let sp = spec();
        let batch = fresh_test_batch(&sp, 16, 3, 5);
        assert!(sequential_bayes_explicit(
            &batch,
            &ClassifierPrior::DyadicBlock,
            &ThetaPrior::uniform()
        )
        .is_err());
    }

    #[test]
    fn sequential_log_loss_near_entropy_rate() {
        // With plenty of data the per-step loss approaches the noise
        // entropy of the best-fitting classifiers; crudely, the average
        // loss should sit well below 1 bit and above H(mu)·~0.5.
        let sp = spec();
        let rep = sequential_smoke(&sp);
        let rate = rep.log_loss_bits / rep.m as f64;
        assert!(rate < 1.0, "rate {rate}");
        assert!(rate > 0.3, "rate {rate}");
    }

    fn sequential_smoke(sp: &ProblemSpec) -> SequentialReport {
        sequential_bayes_aggregated(sp, 400, &ThetaPrior::uniform(), None, 77).unwrap()
    }
}
