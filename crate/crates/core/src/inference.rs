//! Shared inference mathematics: entropy, likelihoods, codelengths, the
//! evidence sandwich, the logistic-parameterization identities, and the
//! posterior [`EvidenceTable`].
//!
//! Conventions: every likelihood, evidence, and codelength is a `log2`
//! value (bits). Natural logarithms appear only inside the square-root
//! penalty of the bound-minimizing learner (see [`crate::learners`]).

use crate::logspace::{log2_binomial, log2_sum};
use crate::prior::ThetaPrior;
use crate::{Error, Result};

/// Binary entropy in bits; `H(0) = H(1) = 0` by continuity.
pub fn binary_entropy(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "entropy argument outside [0,1]");
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

/// `log2[ θ^a (1-θ)^{m-a} ]` with the `0·log 0 = 0` limits, so that a
/// degenerate rate scoring zero errors has probability 1.
pub fn log2_likelihood(theta: f64, a: u64, m: u64) -> f64 {
    assert!(a <= m, "error count exceeds sample size");
    assert!((0.0..=1.0).contains(&theta), "theta outside [0,1]");
    let mut ll = 0.0;
    if a > 0 {
        ll += a as f64 * theta.log2(); // -inf when theta == 0 and a > 0
    }
    if m - a > 0 {
        ll += (m - a) as f64 * (1.0 - theta).log2();
    }
    ll
}

/// Maximized (profile) log-likelihood: `max_θ log2 θ^a (1-θ)^{m-a}`,
/// attained at `θ = a/m` and equal to `-m·H(a/m)` bits. Zero for `m = 0`.
pub fn profile_loglik(a: u64, m: u64) -> f64 {
    assert!(a <= m, "error count exceeds sample size");
    if m == 0 {
        return 0.0;
    }
    -(m as f64) * binary_entropy(a as f64 / m as f64)
}

/// Two-part codelength of `a` errors under a classifier with the given
/// prior mass: `-log2 P(c) + log2 C(m, a)` bits.
pub fn two_part_codelength(log2_prior: f64, a: u64, m: u64) -> f64 {
    -log2_prior + log2_binomial(m, a)
}

/// Two-sided bound on the negative log-evidence `-log2 ∫ θ^a(1-θ)^{m-a} p(θ) dθ`.
///
/// Applies when the θ-prior density is bounded below by `gamma > 0` and
/// the empirical rate satisfies `alpha + 1/√m < a/m ≤ 1/2`. Returns
/// `(lower, upper)` with
///
/// * `lower = m·H(a/m)` (integrated evidence never exceeds the maximized
///   likelihood — this direction in fact needs no precondition), and
/// * `upper = lower + ½·log2 m + (½ / (alpha(1-alpha)))·log2 e − log2 gamma`.
pub fn evidence_sandwich(a: u64, m: u64, gamma: f64, alpha: f64) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::InvalidParameter("sandwich needs m >= 1".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(
            "sandwich needs a strictly positive density floor".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "sandwich margin alpha must lie in (0, 0.5) (got {alpha})"
        )));
    }
    let rate = a as f64 / m as f64;
    let mf = m as f64;
    if !(alpha + 1.0 / mf.sqrt() < rate && rate <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "empirical rate {rate} outside (alpha + 1/sqrt(m), 1/2]"
        )));
    }
    let lower = mf * binary_entropy(rate);
    let upper = lower + 0.5 * mf.log2() + 0.5 / (alpha * (1.0 - alpha)) * crate::logspace::LOG2_E
        - gamma.log2();
    Ok((lower, upper))
}

/// The noisy-channel predictive probability `p(y | x)` computed three
/// algebraically distinct ways:
///
/// 1. directly — `1-θ` if the classifier output matches the label, else `θ`;
/// 2. through the logit weight `β = ln((1-θ)/θ)` applied to the 0/1
///    disagreement indicator;
/// 3. through the symmetric ±1 recoding, whose weight is `β/2` (the logit
///    weight is twice the symmetric one).
///
/// All three must agree to full precision; the triple is returned so
/// callers can assert the identity.
pub fn logistic_equivalents(theta: f64, c_out: bool, y: bool) -> (f64, f64, f64) {
    assert!(
        theta > 0.0 && theta < 1.0,
        "logistic forms need theta in (0,1)"
    );
    let direct = if y == c_out { 1.0 - theta } else { theta };

    let beta = ((1.0 - theta) / theta).ln();
    let disagree = if y == c_out { 0.0 } else { 1.0 };
    let logit = (-beta * disagree).exp() / (1.0 + (-beta).exp());

    let s = if c_out == y { 1.0 } else { -1.0 };
    let w = beta / 2.0;
    let symmetric = (w * s).exp() / ((w).exp() + (-w).exp());

    (direct, logit, symmetric)
}

/// Identifies what a posterior-table row aggregates over.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowId {
    /// One concrete classifier index.
    Classifier { index: u64 },
    /// Every classifier of one dyadic block sharing one error count.
    BlockCell { block: u32 },
    /// Expectation aggregate over a contiguous range of dyadic blocks at
    /// one error count (deterministic envelope of huge blocks).
    BlockRange { min_block: u32, max_block: u32 },
    /// A single far-tail classifier known through `log2` of its index.
    TailIndex { log2_index: f64 },
}

/// Input to [`EvidenceTable::build`]: one aggregate of classifiers that
/// share an error count.
#[derive(Debug, Clone, Copy)]
pub struct TableEntry {
    pub id: RowId,
    /// Training errors shared by every classifier in the aggregate.
    pub errors: u64,
    /// `log2` of the total prior mass of the aggregate.
    pub log2_aggregate_mass: f64,
    /// `log2` of the prior mass of a single (best) member, used for
    /// per-classifier codelengths.
    pub log2_unit_mass: f64,
}

/// One scored row of the posterior table.
#[derive(Debug, Clone)]
pub struct EvidenceRow {
    pub id: RowId,
    pub errors: u64,
    pub log2_aggregate_mass: f64,
    pub log2_unit_mass: f64,
    /// Maximized log-likelihood (profile), bits.
    pub log2_profile: f64,
    /// Integrated evidence under the θ-prior, bits.
    pub log2_evidence: f64,
    /// Per-member two-part codelength, bits.
    pub two_part_bits: f64,
    /// Normalized posterior weight of the whole aggregate, `log2`.
    pub log2_posterior: f64,
    /// Posterior mean of θ given this row's error count.
    pub posterior_theta: f64,
}

/// Log-domain posterior table over classifier aggregates.
///
/// Built from prior masses and error counts alone — no sample
/// representation is required, so explicit, aggregated, and toy pipelines
/// all feed the same table.
#[derive(Debug, Clone)]
pub struct EvidenceTable {
    pub m: u64,
    pub rows: Vec<EvidenceRow>,
    /// `log2 Σ_rows 2^{aggregate mass} · evidence` — the joint data
    /// evidence (data codelength is its negation).
    pub log2_normalizer: f64,
}

impl EvidenceTable {
    /// Score and normalize the given aggregates under one θ-prior.
    pub fn build(m: u64, theta_prior: &ThetaPrior, entries: &[TableEntry]) -> EvidenceTable {
        // Every θ-prior term depends on a row only through its error
        // count; precompute per-count columns so tables with hundreds of
        // thousands of rows stay cheap.
        let max_err = entries.iter().map(|e| e.errors).max().unwrap_or(0) as usize;
        let mut ev = Vec::with_capacity(max_err + 1);
        let mut pm = Vec::with_capacity(max_err + 1);
        let mut prof = Vec::with_capacity(max_err + 1);
        let mut bin = Vec::with_capacity(max_err + 1);
        for h in 0..=max_err as u64 {
            ev.push(theta_prior.log2_evidence(h, m));
            pm.push(theta_prior.posterior_mean(h, m));
            prof.push(profile_loglik(h, m));
            bin.push(crate::logspace::log2_binomial(m, h));
        }
        let mut rows: Vec<EvidenceRow> = entries
            .iter()
            .map(|&e| {
                let h = e.errors as usize;
                EvidenceRow {
                    id: e.id,
                    errors: e.errors,
                    log2_aggregate_mass: e.log2_aggregate_mass,
                    log2_unit_mass: e.log2_unit_mass,
                    log2_profile: prof[h],
                    log2_evidence: ev[h],
                    two_part_bits: -e.log2_unit_mass + bin[h],
                    log2_posterior: e.log2_aggregate_mass + ev[h],
                    posterior_theta: pm[h],
                }
            })
            .collect();
        let joint: Vec<f64> = rows.iter().map(|r| r.log2_posterior).collect();
        let log2_normalizer = log2_sum(&joint);
        for r in &mut rows {
            r.log2_posterior -= log2_normalizer;
        }
        EvidenceTable {
            m,
            rows,
            log2_normalizer,
        }
    }

    /// Sum of normalized posterior weights (should be 1 up to rounding).
    pub fn posterior_total(&self) -> f64 {
        self.rows.iter().map(|r| r.log2_posterior.exp2()).sum()
    }
}
