//! Output contract: `rows.csv` (one row per trial×algorithm),
//! `summary.csv` (recomputable aggregates), `region.csv` (sweep curves),
//! `meta.json` (config echo + hash), and `timings.csv` (wall times, kept
//! out of the main files so re-runs are byte-identical).

use crate::config::ExperimentConfig;
use anyhow::{Context, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

pub const SCHEMA_VERSION: &str = "1";

pub const ROWS_HEADER: &str = "experiment,m,trial,seed,algorithm,selected,errors,\
empirical_error,true_error,true_error_ci_lo,true_error_ci_hi,score_bits,\
zero_error_event,warnings";

pub const SUMMARY_HEADER: &str = "experiment,m,algorithm,trials,optimal_frac,\
suboptimal_frac,zero_error_frac,mean_empirical_error,mean_true_error,mean_score_bits";

pub const REGION_HEADER: &str = "mu,lower_curve,upper_curve,mu_prime,observed_map_error";

/// One emitted result row. Optional fields print as empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub experiment: String,
    pub m: u64,
    pub trial: u64,
    pub seed: u64,
    pub algorithm: String,
    pub selected: String,
    pub errors: Option<u64>,
    pub empirical_error: Option<f64>,
    pub true_error: Option<f64>,
    pub true_error_ci_lo: Option<f64>,
    pub true_error_ci_hi: Option<f64>,
    pub score_bits: Option<f64>,
    pub zero_error_event: Option<bool>,
    pub warnings: String,
}

/// Wall time of one trial; lives in the sidecar only.
#[derive(Debug, Clone)]
pub struct TimingRow {
    pub experiment: String,
    pub m: u64,
    pub trial: u64,
    pub wall_ms: u128,
}

/// Region-sweep curve point.
#[derive(Debug, Clone)]
pub struct RegionRow {
    pub mu: f64,
    pub lower_curve: f64,
    pub upper_curve: f64,
    pub mu_prime: f64,
    pub observed_map_error: f64,
}

/// Aggregate over the rows of one (m, algorithm) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub m: u64,
    pub algorithm: String,
    pub trials: u64,
    pub optimal_frac: Option<f64>,
    pub suboptimal_frac: Option<f64>,
    pub zero_error_frac: Option<f64>,
    pub mean_empirical_error: Option<f64>,
    pub mean_true_error: Option<f64>,
    pub mean_score_bits: Option<f64>,
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

fn fmt_opt_u64(v: Option<u64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

fn fmt_opt_bool(v: Option<bool>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

/// Stable emission order regardless of worker scheduling.
pub fn sort_rows(rows: &mut [TrialRow]) {
    rows.sort_by(|a, b| {
        (a.m, a.trial, a.algorithm.as_str()).cmp(&(b.m, b.trial, b.algorithm.as_str()))
    });
}

pub fn rows_csv(rows: &[TrialRow]) -> String {
    let mut out = String::from(ROWS_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.experiment,
            r.m,
            r.trial,
            r.seed,
            r.algorithm,
            r.selected,
            fmt_opt_u64(r.errors),
            fmt_opt_f64(r.empirical_error),
            fmt_opt_f64(r.true_error),
            fmt_opt_f64(r.true_error_ci_lo),
            fmt_opt_f64(r.true_error_ci_hi),
            fmt_opt_f64(r.score_bits),
            fmt_opt_bool(r.zero_error_event),
            r.warnings,
        );
    }
    out
}

/// Recompute the per-(m, algorithm) aggregates from raw rows. The summary
/// file is always produced by this function, so recomputing from the rows
/// reproduces it exactly.
pub fn summarize(rows: &[TrialRow], mu: f64, mu_prime: f64) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(u64, String), Vec<&TrialRow>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.m, r.algorithm.clone()))
            .or_default()
            .push(r);
    }
    let mean = |xs: &[f64]| {
        if xs.is_empty() {
            None
        } else {
            Some(xs.iter().sum::<f64>() / xs.len() as f64)
        }
    };
    groups
        .into_iter()
        .map(|((m, algorithm), rs)| {
            let true_errs: Vec<f64> = rs.iter().filter_map(|r| r.true_error).collect();
            let emp: Vec<f64> = rs.iter().filter_map(|r| r.empirical_error).collect();
            let scores: Vec<f64> = rs.iter().filter_map(|r| r.score_bits).collect();
            let events: Vec<bool> = rs.iter().filter_map(|r| r.zero_error_event).collect();
            let optimal = if true_errs.is_empty() {
                None
            } else {
                Some(true_errs.iter().filter(|&&e| e == mu).count() as f64 / true_errs.len() as f64)
            };
            let suboptimal = if true_errs.is_empty() {
                None
            } else {
                Some(
                    true_errs.iter().filter(|&&e| e == mu_prime).count() as f64
                        / true_errs.len() as f64,
                )
            };
            let zero_frac = if events.is_empty() {
                None
            } else {
                Some(events.iter().filter(|&&e| e).count() as f64 / events.len() as f64)
            };
            SummaryRow {
                experiment: rs[0].experiment.clone(),
                m,
                algorithm,
                trials: rs.len() as u64,
                optimal_frac: optimal,
                suboptimal_frac: suboptimal,
                zero_error_frac: zero_frac,
                mean_empirical_error: mean(&emp),
                mean_true_error: mean(&true_errs),
                mean_score_bits: mean(&scores),
            }
        })
        .collect()
}

pub fn summary_csv(summaries: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.experiment,
            s.m,
            s.algorithm,
            s.trials,
            fmt_opt_f64(s.optimal_frac),
            fmt_opt_f64(s.suboptimal_frac),
            fmt_opt_f64(s.zero_error_frac),
            fmt_opt_f64(s.mean_empirical_error),
            fmt_opt_f64(s.mean_true_error),
            fmt_opt_f64(s.mean_score_bits),
        );
    }
    out
}

pub fn region_csv(rows: &[RegionRow]) -> String {
    let mut out = String::from(REGION_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.mu, r.lower_curve, r.upper_curve, r.mu_prime, r.observed_map_error
        );
    }
    out
}

pub fn timings_csv(rows: &[TimingRow]) -> String {
    let mut out = String::from("experiment,m,trial,wall_ms\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.experiment, r.m, r.trial, r.wall_ms);
    }
    out
}

pub fn meta_json(cfg: &ExperimentConfig) -> String {
    let meta = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "config": cfg.echo_map(),
        "config_hash": cfg.hash(),
    });
    serde_json::to_string_pretty(&meta).expect("static structure serializes")
}

/// Write every output file for one run into `dir`.
pub fn write_run(
    dir: &Path,
    cfg: &ExperimentConfig,
    rows: &[TrialRow],
    summaries: &[SummaryRow],
    region: &[RegionRow],
    timings: &[TimingRow],
) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    std::fs::write(dir.join("rows.csv"), rows_csv(rows))?;
    std::fs::write(dir.join("summary.csv"), summary_csv(summaries))?;
    if !region.is_empty() {
        std::fs::write(dir.join("region.csv"), region_csv(region))?;
    }
    std::fs::write(dir.join("meta.json"), meta_json(cfg))?;
    std::fs::write(dir.join("timings.csv"), timings_csv(timings))?;
    Ok(())
}

/// Parse a `rows.csv` body back into rows (used to verify that summaries
/// are recomputable from emitted data alone).
pub fn parse_rows_csv(text: &str) -> Result<Vec<TrialRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    anyhow::ensure!(
        headers.iter().collect::<Vec<_>>().join(",") == ROWS_HEADER,
        "unexpected rows.csv header"
    );
    let opt_f64 = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            Ok(Some(s.parse()?))
        }
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let r = record?;
        rows.push(TrialRow {
            experiment: r[0].to_string(),
            m: r[1].parse()?,
            trial: r[2].parse()?,
            seed: r[3].parse()?,
            algorithm: r[4].to_string(),
            selected: r[5].to_string(),
            errors: if r[6].is_empty() {
                None
            } else {
                Some(r[6].parse()?)
            },
            empirical_error: opt_f64(&r[7])?,
            true_error: opt_f64(&r[8])?,
            true_error_ci_lo: opt_f64(&r[9])?,
            true_error_ci_hi: opt_f64(&r[10])?,
            score_bits: opt_f64(&r[11])?,
            zero_error_event: if r[12].is_empty() {
                None
            } else {
                Some(r[12].parse()?)
            },
            warnings: r[13].to_string(),
        });
    }
    Ok(rows)
}
