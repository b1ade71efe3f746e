//! Penalized selection rules over a classifier pool.
//!
//! Every rule minimizes a codelength-style objective over table rows
//! (see [`TableEntry`]): a prior term plus a data-fit term. The rules
//! differ only in the data-fit term:
//!
//! * **MAP** — profile fit `m·H(ê)` plus the parameter-density charge at
//!   the plug-in noise rate;
//! * **sMAP** — the exact marginal evidence of the error count;
//! * **MDL** — the two-part code `log2 C(m, a)` (no noise prior at all);
//! * **ORB** — empirical error plus a prior-weighted concentration
//!   radius (not a codelength; natural logs inside the radical).
//!
//! The Bayes *predictor* is not a selection rule and lives in
//! [`crate::bayes`].
//!
//! Ties are broken toward the smallest classifier index (then the
//! smaller error count), making every selection deterministic.

use crate::inference::{binary_entropy, RowId, TableEntry};
use crate::logspace::{log2_binomial, LN_2};
use crate::prior::{ClassifierPrior, ThetaPrior};
use crate::problem::ExplicitSample;
use crate::{Error, Result};

/// The five learners exercised by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Algorithm {
    Map,
    Smap,
    Mdl,
    Bayes,
    Orb,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Map => "MAP",
            Algorithm::Smap => "SMAP",
            Algorithm::Mdl => "MDL",
            Algorithm::Bayes => "BAYES",
            Algorithm::Orb => "ORB",
        }
    }

    pub fn all() -> [Algorithm; 5] {
        [
            Algorithm::Map,
            Algorithm::Smap,
            Algorithm::Mdl,
            Algorithm::Bayes,
            Algorithm::Orb,
        ]
    }

    pub fn parse(s: &str) -> Result<Algorithm> {
        match s.to_ascii_uppercase().as_str() {
            "MAP" => Ok(Algorithm::Map),
            "SMAP" => Ok(Algorithm::Smap),
            "MDL" => Ok(Algorithm::Mdl),
            "BAYES" => Ok(Algorithm::Bayes),
            "ORB" => Ok(Algorithm::Orb),
            other => Err(Error::InvalidParameter(format!(
                "unknown algorithm {other}"
            ))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one selection.
#[derive(Debug, Clone)]
pub struct Selection {
    pub algorithm: Algorithm,
    pub id: RowId,
    /// Training errors of the selected row.
    pub errors: u64,
    /// The minimized objective value (bits for the codelength rules).
    pub score: f64,
    /// Training error rate (`NaN` when `m = 0`).
    pub empirical_error: f64,
}

/// Sort key approximating "first classifier index" for deterministic
/// tie-breaking: `log2` of the smallest index a row can denote.
pub fn order_key(id: &RowId) -> f64 {
    match id {
        RowId::Classifier { index: 0 } => -1.0,
        RowId::Classifier { index } => (*index as f64).log2(),
        RowId::BlockCell { block } => (*block - 1) as f64,
        RowId::BlockRange { min_block, .. } => (*min_block - 1) as f64,
        RowId::TailIndex { log2_index } => *log2_index,
    }
}

/// MAP objective: prior bits + profile fit + density charge at the
/// plug-in rate.
///
/// Under a point-mass noise prior the only admissible parameter is its
/// atom, so the profile term is replaced by the likelihood there.
pub fn map_score(log2_unit_mass: f64, errors: u64, m: u64, theta: &ThetaPrior) -> f64 {
    if m == 0 {
        return -log2_unit_mass;
    }
    let rate = errors as f64 / m as f64;
    match theta {
        ThetaPrior::PointMass { theta } => {
            -log2_unit_mass - crate::inference::log2_likelihood(*theta, errors, m)
        }
        _ => -log2_unit_mass + m as f64 * binary_entropy(rate) - theta.log2_density(rate),
    }
}

/// sMAP objective: prior bits + marginal evidence bits.
pub fn smap_score(log2_unit_mass: f64, errors: u64, m: u64, theta: &ThetaPrior) -> f64 {
    if m == 0 {
        return -log2_unit_mass;
    }
    -log2_unit_mass - theta.log2_evidence(errors, m)
}

/// MDL objective: prior bits + exact two-part index code for the error
/// pattern. Independent of any noise prior.
pub fn mdl_score(log2_unit_mass: f64, errors: u64, m: u64) -> f64 {
    -log2_unit_mass + log2_binomial(m, errors)
}

/// ORB objective: empirical error + `sqrt((ln(1/P) + ln m) / (2m))`.
pub fn orb_score(log2_unit_mass: f64, errors: u64, m: u64) -> f64 {
    if m == 0 {
        return -log2_unit_mass;
    }
    let mf = m as f64;
    errors as f64 / mf + orb_penalty(log2_unit_mass, m)
}

/// The ORB concentration radius on its own.
pub fn orb_penalty(log2_unit_mass: f64, m: u64) -> f64 {
    let mf = m as f64;
    ((-log2_unit_mass * LN_2 + mf.ln()) / (2.0 * mf)).sqrt()
}

/// Run one selection rule over prepared table rows.
///
/// `Algorithm::Bayes` is rejected: prediction-by-averaging selects no
/// single row.
pub fn select(
    algorithm: Algorithm,
    entries: &[TableEntry],
    m: u64,
    theta: &ThetaPrior,
) -> Result<Selection> {
    if matches!(algorithm, Algorithm::Bayes) {
        return Err(Error::Unsupported(
            "the Bayes predictor averages rather than selects; use the bayes module".into(),
        ));
    }
    if entries.is_empty() {
        return Err(Error::InvalidParameter("no candidate rows".into()));
    }

    // Scores depend on the row only through (unit mass, errors); cache
    // the per-error-count part so a sweep over many rows stays cheap.
    let max_err = entries.iter().map(|e| e.errors).max().unwrap() as usize;
    let fit: Vec<f64> = match algorithm {
        Algorithm::Map => (0..=max_err)
            .map(|h| map_score(0.0, h as u64, m, theta))
            .collect(),
        Algorithm::Smap => (0..=max_err)
            .map(|h| smap_score(0.0, h as u64, m, theta))
            .collect(),
        Algorithm::Mdl => (0..=max_err).map(|h| mdl_score(0.0, h as u64, m)).collect(),
        Algorithm::Orb => (0..=max_err).map(|h| orb_score(0.0, h as u64, m)).collect(),
        Algorithm::Bayes => unreachable!(),
    };

    let mut best: Option<(f64, f64, u64, &TableEntry)> = None;
    for e in entries {
        if e.log2_unit_mass == f64::NEG_INFINITY {
            continue; // outside the prior's support
        }
        let score = if matches!(algorithm, Algorithm::Orb) && m > 0 {
            e.errors as f64 / m as f64 + orb_penalty(e.log2_unit_mass, m)
        } else {
            -e.log2_unit_mass + fit[e.errors as usize]
        };
        let key = (score, order_key(&e.id), e.errors);
        let replace = match &best {
            None => true,
            Some((s, k, err, _)) => (key.0, key.1, key.2) < (*s, *k, *err),
        };
        if replace {
            best = Some((key.0, key.1, key.2, e));
        }
    }
    let (score, _, _, row) = best.ok_or_else(|| {
        Error::InvalidParameter("every candidate row lies outside the prior support".into())
    })?;
    Ok(Selection {
        algorithm,
        id: row.id.clone(),
        errors: row.errors,
        score,
        empirical_error: if m == 0 {
            f64::NAN
        } else {
            row.errors as f64 / m as f64
        },
    })
}

/// Table rows for an explicitly materialized sample under an arbitrary
/// prior: one row per classifier `0..=k_bad`.
///
/// Fails on test batches: evaluation data must never reach a fitting
/// path.
pub fn explicit_table_entries(
    sample: &ExplicitSample,
    prior: &ClassifierPrior,
) -> Result<Vec<TableEntry>> {
    if sample.test_data {
        return Err(Error::InvalidParameter(
            "refusing to fit on a batch flagged as test data".into(),
        ));
    }
    let limit = match prior.max_index() {
        Some(mx) => mx.min(sample.k_bad as u64),
        None => sample.k_bad as u64,
    };
    let counts = sample.error_counts();
    Ok((0..=limit)
        .map(|j| {
            let p = prior.log2_prior(j);
            TableEntry {
                id: RowId::Classifier { index: j },
                errors: counts[j as usize],
                log2_aggregate_mass: p,
                log2_unit_mass: p,
            }
        })
        .collect())
}

/// One-sided generalization guarantee `ê + sqrt((ln(1/P) + ln(1/δ)) /
/// (2m))`, valid for each classifier simultaneously with probability
/// `1 - δ` over samples.
pub fn occam_bound(log2_prior: f64, errors: u64, m: u64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence delta={delta} outside (0,1)"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("occam bound needs m >= 1".into()));
    }
    let mf = m as f64;
    Ok(errors as f64 / mf + ((-log2_prior * LN_2 + (1.0 / delta).ln()) / (2.0 * mf)).sqrt())
}
