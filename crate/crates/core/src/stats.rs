//! Small statistical helpers shared by experiments and tests.

use crate::{Error, Result};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided 95% normal quantile used for error-bar reporting.
pub const Z_95: f64 = 1.959963984540054;

/// Wilson score interval for a binomial proportion.
///
/// Returns `(lo, hi)`; degenerate `n = 0` yields the vacuous `(0, 1)`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Result of a two-sample chi-square homogeneity test.
#[derive(Debug, Clone, Copy)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: u64,
    pub p_value: f64,
    /// Number of (pooled) bins that entered the statistic.
    pub bins: usize,
}

/// Two-sample chi-square test that two sets of categorical counts come
/// from a common distribution.
///
/// Inputs are histograms over the same ordered category axis. Adjacent
/// categories are pooled until every expected count is at least 5, the
/// textbook validity rule; with fewer than two pooled bins the test is
/// vacuous (`p = 1`).
pub fn chi_square_two_sample(a: &[(u64, u64)], b: &[(u64, u64)]) -> Result<ChiSquareResult> {
    // Merge the category axes.
    let mut categories: Vec<u64> = a.iter().chain(b.iter()).map(|&(k, _)| k).collect();
    categories.sort_unstable();
    categories.dedup();
    let lookup = |hist: &[(u64, u64)], k: u64| -> u64 {
        hist.iter()
            .find(|&&(c, _)| c == k)
            .map(|&(_, v)| v)
            .unwrap_or(0)
    };
    let rows: Vec<(f64, f64)> = categories
        .iter()
        .map(|&k| (lookup(a, k) as f64, lookup(b, k) as f64))
        .collect();
    let n_a: f64 = rows.iter().map(|r| r.0).sum();
    let n_b: f64 = rows.iter().map(|r| r.1).sum();
    if n_a == 0.0 || n_b == 0.0 {
        return Err(Error::InvalidParameter(
            "chi-square needs observations in both samples".into(),
        ));
    }
    let total = n_a + n_b;

    // Pool adjacent categories until each expected cell count is >= 5.
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for &(ca, cb) in &rows {
        acc.0 += ca;
        acc.1 += cb;
        let col = acc.0 + acc.1;
        if (n_a * col / total) >= 5.0 && (n_b * col / total) >= 5.0 {
            pooled.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        // Fold the remainder into the last bin.
        if let Some(last) = pooled.last_mut() {
            last.0 += acc.0;
            last.1 += acc.1;
        } else {
            pooled.push(acc);
        }
    }

    if pooled.len() < 2 {
        return Ok(ChiSquareResult {
            statistic: 0.0,
            degrees_of_freedom: 0,
            p_value: 1.0,
            bins: pooled.len(),
        });
    }

    let mut stat = 0.0;
    for &(oa, ob) in &pooled {
        let col = oa + ob;
        let ea = n_a * col / total;
        let eb = n_b * col / total;
        stat += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
    }
    let df = (pooled.len() - 1) as u64;
    let dist = ChiSquared::new(df as f64).expect("df >= 1");
    Ok(ChiSquareResult {
        statistic: stat,
        degrees_of_freedom: df,
        p_value: 1.0 - dist.cdf(stat),
        bins: pooled.len(),
    })
}
