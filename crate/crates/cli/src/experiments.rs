//! Experiment runners: each orchestrates core-library operations over an
//! (m, trials) grid, gathers per-trial rows from a worker pool, and sorts
//! them so the output is deterministic regardless of scheduling.
//!
//! Failure taxonomy: *hard* failures are violated invariants (exact
//! identities, containment checks) and make the run exit nonzero;
//! *statistical* failures are threshold misses on Monte-Carlo proportions
//! and only affect the exit code under `--strict`.

use crate::config::{ExperimentConfig, ExperimentId};
use crate::output::{sort_rows, summarize, RegionRow, SummaryRow, TimingRow, TrialRow};
use anyhow::{bail, Result};
use occamlab::aggregate::sample_aggregated;
use occamlab::bayes::{
    bayes_errors_on_batch, bayes_generalization_aggregated, sequential_bayes_aggregated,
    sequential_bayes_explicit,
};
use occamlab::inference::{
    binary_entropy, evidence_sandwich, logistic_equivalents, EvidenceTable, RowId,
};
use occamlab::learners::{explicit_table_entries, occam_bound, select, Algorithm};
use occamlab::prior::ClassifierPrior;
use occamlab::problem::{fresh_test_batch, sample_explicit, ProblemSpec};
use occamlab::rng::StreamRng;
use occamlab::stats::{chi_square_two_sample, wilson_interval, Z_95};
use occamlab::toy::ToyProblem;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::time::Instant;

/// Everything one run produces, before any file is written.
#[derive(Debug)]
pub struct ExperimentResult {
    pub rows: Vec<TrialRow>,
    pub summaries: Vec<SummaryRow>,
    pub region: Vec<RegionRow>,
    pub timings: Vec<TimingRow>,
    /// Violated invariants (exit code 2).
    pub hard_failures: Vec<String>,
    /// Missed statistical thresholds (exit code 3 under --strict).
    pub stat_failures: Vec<String>,
}

impl ExperimentResult {
    fn new() -> Self {
        ExperimentResult {
            rows: Vec::new(),
            summaries: Vec::new(),
            region: Vec::new(),
            timings: Vec::new(),
            hard_failures: Vec::new(),
            stat_failures: Vec::new(),
        }
    }
}

/// Deterministic per-trial seed: independent of scheduling and of every
/// other (experiment, m, trial) combination.
pub fn trial_seed(master: u64, experiment: ExperimentId, m: u64, trial: u64) -> u64 {
    let tag = ExperimentId::ALL
        .iter()
        .position(|e| *e == experiment)
        .unwrap() as u64;
    StreamRng::from_seed_path(master, &[1_000 + tag, m, trial]).next_u64()
}

/// Human-readable selected-hypothesis descriptor (comma-free for CSV).
pub fn descriptor(id: &RowId) -> String {
    match id {
        RowId::Classifier { index } => format!("c{index}"),
        RowId::BlockCell { block } => format!("block{block}"),
        RowId::BlockRange {
            min_block,
            max_block,
        } => format!("blocks{min_block}-{max_block}"),
        RowId::TailIndex { log2_index } => format!("tail2^{log2_index:.3}"),
    }
}

/// True generalization error of the classifier a selector row denotes.
pub fn selected_true_error(spec: &ProblemSpec, id: &RowId) -> f64 {
    match id {
        RowId::Classifier { index: 0 } => spec.mu,
        _ => spec.mu_prime,
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()
        .map_err(|e| e.context("invalid configuration"))?;
    match cfg.experiment {
        ExperimentId::Inconsistency => run_selection_trials(cfg, Algorithm::all().to_vec()),
        ExperimentId::OrbConsistency => run_selection_trials(cfg, vec![Algorithm::Orb]),
        ExperimentId::Sequential => run_sequential(cfg),
        ExperimentId::EvidenceBracket => run_evidence_bracket(cfg),
        ExperimentId::KlCalibration => run_kl_calibration(cfg),
        ExperimentId::RegionSweep => run_region_sweep(cfg),
        ExperimentId::OracleCompare => run_oracle_compare(cfg),
        ExperimentId::OccamCheck => run_occam_check(cfg),
    }
}

/// Proportion thresholds used by the built-in statistical checks.
mod thresholds {
    /// Suboptimal-selection and zero-error-event fractions at reference
    /// scale (`m >= 4096`, inside the inconsistency regime).
    pub const INCONSISTENCY_FRAC: f64 = 0.95;
    pub const INCONSISTENCY_MIN_M: u64 = 4096;
    /// Optimal-selection fraction for the bound minimizer at `m >= 16384`.
    pub const ORB_FRAC: f64 = 0.95;
    pub const ORB_MIN_M: u64 = 16384;
    /// Fraction of trials whose online mistake rate respects the entropy
    /// bound, at `m >= 2000`.
    pub const SEQUENTIAL_FRAC: f64 = 0.98;
    pub const SEQUENTIAL_MIN_M: u64 = 2000;
    /// Two-sample agreement p-value floor.
    pub const ORACLE_P: f64 = 0.01;
}

// ---------------------------------------------------------------------
// inconsistency / orb-consistency
// ---------------------------------------------------------------------

fn selection_algorithms(algorithms: &[Algorithm]) -> Vec<Algorithm> {
    algorithms
        .iter()
        .copied()
        .filter(|a| !matches!(a, Algorithm::Bayes))
        .collect()
}

fn run_selection_trials(
    cfg: &ExperimentConfig,
    algorithms: Vec<Algorithm>,
) -> Result<ExperimentResult> {
    let spec = cfg.problem()?;
    let prior = cfg.classifier_prior()?;
    let theta = cfg.theta_prior()?;
    let want_bayes = algorithms.contains(&Algorithm::Bayes) && cfg.m_test > 0;
    let selectors = selection_algorithms(&algorithms);

    if want_bayes && !matches!(prior, ClassifierPrior::DyadicBlock) && cfg.mode.aggregated_at(64) {
        bail!("the Bayes arm in aggregated mode requires prior.classifier = dyadic");
    }

    let jobs: Vec<(u64, u64)> = cfg
        .m_list
        .iter()
        .flat_map(|&m| (0..cfg.trials).map(move |t| (m, t)))
        .collect();

    let trial_outputs: Vec<(Vec<TrialRow>, TimingRow)> = jobs
        .par_iter()
        .map(|&(m, trial)| -> Result<(Vec<TrialRow>, TimingRow)> {
            let started = Instant::now();
            let seed = trial_seed(cfg.seed, cfg.experiment, m, trial);
            let mut rows = Vec::new();
            let mut warnings = Vec::new();
            if !spec.inconsistency_regime() {
                warnings.push("out_of_regime".to_string());
            }

            if cfg.mode.aggregated_at(m) {
                let sample = sample_aggregated(&spec, m, &prior, cfg.n_max, seed)?;
                if sample.truncation_warning {
                    warnings.push("pool_truncated".to_string());
                }
                let event = sample.zero_error_event();
                let entries = sample.table_entries();
                for alg in &selectors {
                    let sel = select(*alg, &entries, m, &theta)?;
                    rows.push(TrialRow {
                        experiment: cfg.experiment.name().to_string(),
                        m,
                        trial,
                        seed,
                        algorithm: alg.name().to_string(),
                        selected: descriptor(&sel.id),
                        errors: Some(sel.errors),
                        empirical_error: Some(sel.empirical_error),
                        true_error: Some(selected_true_error(&spec, &sel.id)),
                        true_error_ci_lo: None,
                        true_error_ci_hi: None,
                        score_bits: Some(sel.score),
                        zero_error_event: Some(event),
                        warnings: warnings.join(";"),
                    });
                }
                if want_bayes {
                    let report =
                        bayes_generalization_aggregated(&sample, &theta, cfg.m_test, seed)?;
                    rows.push(TrialRow {
                        experiment: cfg.experiment.name().to_string(),
                        m,
                        trial,
                        seed,
                        algorithm: Algorithm::Bayes.name().to_string(),
                        selected: "posterior-average".to_string(),
                        errors: Some(report.errors),
                        empirical_error: Some(report.empirical_error),
                        true_error: Some(report.empirical_error),
                        true_error_ci_lo: Some(report.ci_lo),
                        true_error_ci_hi: Some(report.ci_hi),
                        score_bits: None,
                        zero_error_event: Some(event),
                        warnings: warnings.join(";"),
                    });
                }
            } else {
                let sample = sample_explicit(&spec, m as usize, cfg.k_classifiers as usize, seed);
                let entries = explicit_table_entries(&sample, &prior)?;
                let event = entries[1..].iter().any(|e| e.errors == 0);
                for alg in &selectors {
                    let sel = select(*alg, &entries, m, &theta)?;
                    rows.push(TrialRow {
                        experiment: cfg.experiment.name().to_string(),
                        m,
                        trial,
                        seed,
                        algorithm: alg.name().to_string(),
                        selected: descriptor(&sel.id),
                        errors: Some(sel.errors),
                        empirical_error: Some(sel.empirical_error),
                        true_error: Some(selected_true_error(&spec, &sel.id)),
                        true_error_ci_lo: None,
                        true_error_ci_hi: None,
                        score_bits: Some(sel.score),
                        zero_error_event: Some(event),
                        warnings: warnings.join(";"),
                    });
                }
                if want_bayes {
                    let table = EvidenceTable::build(m, &theta, &entries);
                    let test_seed =
                        StreamRng::from_seed_path(seed, &[occamlab::rng::streams::TEST]).next_u64();
                    let batch = fresh_test_batch(
                        &spec,
                        cfg.m_test as usize,
                        cfg.k_classifiers as usize,
                        test_seed,
                    );
                    let errors = bayes_errors_on_batch(&table, &batch)?;
                    let emp = errors as f64 / cfg.m_test as f64;
                    let (lo, hi) = wilson_interval(errors, cfg.m_test, Z_95);
                    rows.push(TrialRow {
                        experiment: cfg.experiment.name().to_string(),
                        m,
                        trial,
                        seed,
                        algorithm: Algorithm::Bayes.name().to_string(),
                        selected: "posterior-average".to_string(),
                        errors: Some(errors),
                        empirical_error: Some(emp),
                        true_error: Some(emp),
                        true_error_ci_lo: Some(lo),
                        true_error_ci_hi: Some(hi),
                        score_bits: None,
                        zero_error_event: Some(event),
                        warnings: warnings.join(";"),
                    });
                }
            }
            let timing = TimingRow {
                experiment: cfg.experiment.name().to_string(),
                m,
                trial,
                wall_ms: started.elapsed().as_millis(),
            };
            Ok((rows, timing))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut result = ExperimentResult::new();
    for (rows, timing) in trial_outputs {
        result.rows.extend(rows);
        result.timings.push(timing);
    }
    sort_rows(&mut result.rows);
    result.timings.sort_by_key(|t| (t.m, t.trial));
    result.summaries = summarize(&result.rows, spec.mu, spec.mu_prime);
    selection_stat_checks(cfg, &spec, &result.summaries, &mut result.stat_failures);
    Ok(result)
}

/// Reference-scale proportion checks for the selection experiments.
fn selection_stat_checks(
    cfg: &ExperimentConfig,
    spec: &ProblemSpec,
    summaries: &[SummaryRow],
    failures: &mut Vec<String>,
) {
    for s in summaries {
        match cfg.experiment {
            ExperimentId::Inconsistency => {
                if !spec.inconsistency_regime() || s.m < thresholds::INCONSISTENCY_MIN_M {
                    continue;
                }
                if ["MAP", "SMAP", "MDL"].contains(&s.algorithm.as_str()) {
                    if let Some(frac) = s.suboptimal_frac {
                        if frac < thresholds::INCONSISTENCY_FRAC {
                            failures.push(format!(
                                "m={} {}: suboptimal fraction {frac} below {}",
                                s.m,
                                s.algorithm,
                                thresholds::INCONSISTENCY_FRAC
                            ));
                        }
                    }
                    if let Some(frac) = s.zero_error_frac {
                        if frac < thresholds::INCONSISTENCY_FRAC {
                            failures.push(format!(
                                "m={}: zero-training-error event fraction {frac} below {}",
                                s.m,
                                thresholds::INCONSISTENCY_FRAC
                            ));
                        }
                    }
                }
            }
            ExperimentId::OrbConsistency => {
                if s.m < thresholds::ORB_MIN_M || s.algorithm != "ORB" {
                    continue;
                }
                if let Some(frac) = s.optimal_frac {
                    if frac < thresholds::ORB_FRAC {
                        failures.push(format!(
                            "m={}: bound-minimizer optimal fraction {frac} below {}",
                            s.m,
                            thresholds::ORB_FRAC
                        ));
                    }
                }
            }
            _ => {}
        }
    }
}

// ---------------------------------------------------------------------
// sequential
// ---------------------------------------------------------------------

fn run_sequential(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let spec = cfg.problem()?;
    let prior = cfg.classifier_prior()?;
    let theta = cfg.theta_prior()?;
    let bound = binary_entropy(spec.mu) + cfg.delta;

    let jobs: Vec<(u64, u64)> = cfg
        .m_list
        .iter()
        .flat_map(|&m| (0..cfg.trials).map(move |t| (m, t)))
        .collect();

    let outputs: Vec<(TrialRow, TimingRow, Option<String>)> = jobs
        .par_iter()
        .map(|&(m, trial)| -> Result<(TrialRow, TimingRow, Option<String>)> {
            let started = Instant::now();
            let seed = trial_seed(cfg.seed, cfg.experiment, m, trial);
            let report = if cfg.mode.aggregated_at(m) {
                if !matches!(prior, ClassifierPrior::DyadicBlock) {
                    bail!("sequential prediction in aggregated mode requires prior.classifier = dyadic");
                }
                sequential_bayes_aggregated(&spec, m, &theta, cfg.n_max, seed)?
            } else {
                let sample = sample_explicit(&spec, m as usize, cfg.k_classifiers as usize, seed);
                sequential_bayes_explicit(&sample, &prior, &theta)?
            };
            let rate = report.mistakes as f64 / m as f64;
            let hard = if report.chain_rule_gap > 1e-6 {
                Some(format!(
                    "m={m} trial={trial}: chain-rule gap {} exceeds 1e-6 bits",
                    report.chain_rule_gap
                ))
            } else {
                None
            };
            let row = TrialRow {
                experiment: cfg.experiment.name().to_string(),
                m,
                trial,
                seed,
                algorithm: "SEQ".to_string(),
                selected: "online-posterior".to_string(),
                errors: Some(report.mistakes),
                empirical_error: Some(rate),
                true_error: None,
                true_error_ci_lo: None,
                true_error_ci_hi: None,
                score_bits: Some(report.log_loss_bits),
                zero_error_event: None,
                warnings: if rate <= bound { String::new() } else { "rate_above_bound".into() },
            };
            let timing = TimingRow {
                experiment: cfg.experiment.name().to_string(),
                m,
                trial,
                wall_ms: started.elapsed().as_millis(),
            };
            Ok((row, timing, hard))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut result = ExperimentResult::new();
    for (row, timing, hard) in outputs {
        result.rows.push(row);
        result.timings.push(timing);
        result.hard_failures.extend(hard);
    }
    sort_rows(&mut result.rows);
    result.timings.sort_by_key(|t| (t.m, t.trial));
    result.summaries = summarize(&result.rows, spec.mu, spec.mu_prime);

    for &m in &cfg.m_list {
        if m < thresholds::SEQUENTIAL_MIN_M {
            continue;
        }
        let in_bound = result
            .rows
            .iter()
            .filter(|r| r.m == m && r.warnings.is_empty())
            .count();
        let frac = in_bound as f64 / cfg.trials as f64;
        if frac < thresholds::SEQUENTIAL_FRAC {
            result.stat_failures.push(format!(
                "m={m}: mistake-rate bound held in {frac} of trials, below {}",
                thresholds::SEQUENTIAL_FRAC
            ));
        }
    }
    Ok(result)
}

// ---------------------------------------------------------------------
// evidence-bracket
// ---------------------------------------------------------------------

fn run_evidence_bracket(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let theta = cfg.theta_prior()?;
    let gamma = theta.density_floor();
    if !(gamma > 0.0) {
        bail!("the evidence-sandwich check needs a noise prior with a positive density floor");
    }
    let mut result = ExperimentResult::new();
    for &m in &cfg.m_list {
        let started = Instant::now();
        let mut checked = 0u64;
        let mut violations = 0u64;
        let mut min_margin = f64::INFINITY;
        for a in 0..=m {
            let Ok((lo, hi)) = evidence_sandwich(a, m, gamma, cfg.alpha) else {
                continue;
            };
            checked += 1;
            let v = -theta.log2_evidence(a, m);
            min_margin = min_margin.min(v - lo).min(hi - v);
            if !(lo - 1e-9..=hi + 1e-9).contains(&v) {
                violations += 1;
                result.hard_failures.push(format!(
                    "m={m} a={a}: -log2 evidence {v} outside [{lo}, {hi}]"
                ));
            }
        }
        result.rows.push(TrialRow {
            experiment: cfg.experiment.name().to_string(),
            m,
            trial: 0,
            seed: cfg.seed,
            algorithm: "EVIDENCE".to_string(),
            selected: format!("cells={checked}"),
            errors: Some(violations),
            empirical_error: Some(if checked == 0 {
                0.0
            } else {
                violations as f64 / checked as f64
            }),
            true_error: None,
            true_error_ci_lo: None,
            true_error_ci_hi: None,
            score_bits: if min_margin.is_finite() {
                Some(min_margin)
            } else {
                None
            },
            zero_error_event: None,
            warnings: String::new(),
        });
        result.timings.push(TimingRow {
            experiment: cfg.experiment.name().to_string(),
            m,
            trial: 0,
            wall_ms: started.elapsed().as_millis(),
        });
    }
    sort_rows(&mut result.rows);
    result.summaries = summarize(&result.rows, cfg.mu, cfg.mu_prime);
    Ok(result)
}

// ---------------------------------------------------------------------
// kl-calibration
// ---------------------------------------------------------------------

const PROP1_GRID_STEP: f64 = 0.01;

fn run_kl_calibration(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let mut result = ExperimentResult::new();
    for trial in 0..cfg.trials {
        let started = Instant::now();
        let seed = trial_seed(cfg.seed, cfg.experiment, 0, trial);
        let toy = ToyProblem::random_proper(6, 2, seed);
        let mut max_dev = 0.0f64;
        for c in 0..toy.n_classifiers() {
            let argmin = toy.theta_grid_argmin(c, PROP1_GRID_STEP);
            let target = toy
                .true_error(c)
                .clamp(PROP1_GRID_STEP, 1.0 - PROP1_GRID_STEP);
            let dev = (argmin - target).abs();
            max_dev = max_dev.max(dev);
            if dev > PROP1_GRID_STEP + 1e-9 {
                result.hard_failures.push(format!(
                    "toy{trial} classifier {c}: noise-grid argmin {argmin} not within one step of rate {target}"
                ));
            }
        }
        let (c_star, theta_star) = toy.global_grid_argmin(PROP1_GRID_STEP);
        let best = toy.best_classifier();
        if toy.true_error(best) < 0.5 && c_star != best {
            result.hard_failures.push(format!(
                "toy{trial}: global argmin picked classifier {c_star} (error {}) over minimum-error classifier {best} (error {})",
                toy.true_error(c_star),
                toy.true_error(best)
            ));
        }
        let delta_star = toy.kl_delta(c_star, theta_star);
        result.rows.push(TrialRow {
            experiment: cfg.experiment.name().to_string(),
            m: 0,
            trial,
            seed,
            algorithm: "KL".to_string(),
            selected: format!("toy{trial}-c{c_star}"),
            errors: None,
            empirical_error: Some(max_dev),
            true_error: Some(toy.true_error(c_star)),
            true_error_ci_lo: None,
            true_error_ci_hi: None,
            score_bits: Some(delta_star),
            zero_error_event: None,
            warnings: String::new(),
        });
        result.timings.push(TimingRow {
            experiment: cfg.experiment.name().to_string(),
            m: 0,
            trial,
            wall_ms: started.elapsed().as_millis(),
        });
    }

    // Constructed well-specified instance: the divergence gap must vanish
    // at the generating classifier and noise rate.
    let (toy, star) = ToyProblem::well_specified(0.2);
    let gap = toy.kl_delta(star, 0.2);
    if gap.abs() > 1e-12 {
        result
            .hard_failures
            .push(format!("well-specified instance has nonzero gap {gap}"));
    }
    let (c_star, theta_star) = toy.global_grid_argmin(PROP1_GRID_STEP);
    if c_star != star || (theta_star - 0.2).abs() > PROP1_GRID_STEP + 1e-9 {
        result.hard_failures.push(format!(
            "well-specified instance: global argmin (c{c_star}, {theta_star}) missed (c{star}, 0.2)"
        ));
    }
    result.rows.push(TrialRow {
        experiment: cfg.experiment.name().to_string(),
        m: 0,
        trial: cfg.trials,
        seed: cfg.seed,
        algorithm: "KL".to_string(),
        selected: format!("well-specified-c{star}"),
        errors: None,
        empirical_error: Some(0.0),
        true_error: Some(toy.true_error(star)),
        true_error_ci_lo: None,
        true_error_ci_hi: None,
        score_bits: Some(gap),
        zero_error_event: None,
        warnings: String::new(),
    });

    sort_rows(&mut result.rows);
    result.summaries = summarize(&result.rows, cfg.mu, cfg.mu_prime);
    Ok(result)
}

// ---------------------------------------------------------------------
// region-sweep
// ---------------------------------------------------------------------

fn run_region_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let m = *cfg.m_list.iter().max().expect("validated nonempty");
    let prior = cfg.classifier_prior()?;
    let theta = cfg.theta_prior()?;
    let mut result = ExperimentResult::new();

    let grid: Vec<f64> = (1..=9).map(|i| i as f64 * 0.05).collect();
    for (gi, &mu) in grid.iter().enumerate() {
        let lower = 0.5 * binary_entropy(mu);
        let upper = binary_entropy(mu);
        let mu_prime = (0.9 * lower).max(mu);
        let spec = ProblemSpec::new(mu, mu_prime, cfg.mu_hard)?;

        let trial_rows: Vec<(TrialRow, TimingRow)> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| -> Result<(TrialRow, TimingRow)> {
                let started = Instant::now();
                let trial = gi as u64 * cfg.trials + t;
                let seed = trial_seed(cfg.seed, cfg.experiment, m, trial);
                let sample = sample_aggregated(&spec, m, &prior, cfg.n_max, seed)?;
                let sel = select(Algorithm::Map, &sample.table_entries(), m, &theta)?;
                let row = TrialRow {
                    experiment: cfg.experiment.name().to_string(),
                    m,
                    trial,
                    seed,
                    algorithm: Algorithm::Map.name().to_string(),
                    selected: descriptor(&sel.id),
                    errors: Some(sel.errors),
                    empirical_error: Some(sel.empirical_error),
                    true_error: Some(selected_true_error(&spec, &sel.id)),
                    true_error_ci_lo: None,
                    true_error_ci_hi: None,
                    score_bits: Some(sel.score),
                    zero_error_event: Some(sample.zero_error_event()),
                    warnings: format!("mu={mu}"),
                };
                let timing = TimingRow {
                    experiment: cfg.experiment.name().to_string(),
                    m,
                    trial,
                    wall_ms: started.elapsed().as_millis(),
                };
                Ok((row, timing))
            })
            .collect::<Result<Vec<_>>>()?;

        // Modal selected true error across trials.
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for (row, _) in &trial_rows {
            let bits = row.true_error.unwrap().to_bits();
            *counts.entry(bits).or_insert(0) += 1;
        }
        let modal = counts
            .into_iter()
            .max_by_key(|&(_, c)| c)
            .map(|(bits, _)| f64::from_bits(bits))
            .unwrap();

        result.region.push(RegionRow {
            mu,
            lower_curve: lower,
            upper_curve: upper,
            mu_prime,
            observed_map_error: modal,
        });
        for (row, timing) in trial_rows {
            result.rows.push(row);
            result.timings.push(timing);
        }
    }

    sort_rows(&mut result.rows);
    result.timings.sort_by_key(|t| (t.m, t.trial));
    result.summaries = summarize(&result.rows, cfg.mu, cfg.mu_prime);
    Ok(result)
}

// ---------------------------------------------------------------------
// oracle-compare
// ---------------------------------------------------------------------

fn run_oracle_compare(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let spec = cfg.problem()?;
    let theta = cfg.theta_prior()?;
    let prior = cfg.classifier_prior()?;
    if !matches!(prior, ClassifierPrior::DyadicBlock) {
        bail!(
            "the sampler-agreement check compares block histograms; use prior.classifier = dyadic"
        );
    }
    let k = cfg.k_classifiers;
    if !(k + 1).is_power_of_two() {
        bail!("k_classifiers must be 2^n - 1 so explicit blocks are complete (got {k})");
    }
    let n_blocks = (k + 1).trailing_zeros();
    let m = *cfg.m_list.iter().max().expect("validated nonempty");

    let started = Instant::now();
    struct TrialStats {
        m_hard: u64,
        block_mins: Vec<u64>,
        suboptimal: bool,
    }
    let collect = |explicit: bool| -> Result<Vec<TrialStats>> {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| -> Result<TrialStats> {
                let seed = trial_seed(cfg.seed, cfg.experiment, if explicit { 1 } else { 2 }, t);
                if explicit {
                    let s = sample_explicit(&spec, m as usize, k as usize, seed);
                    let entries = explicit_table_entries(&s, &prior)?;
                    let sel = select(Algorithm::Mdl, &entries, m, &theta)?;
                    Ok(TrialStats {
                        m_hard: s.m_hard() as u64,
                        block_mins: s.min_error_per_block(n_blocks),
                        suboptimal: sel.id != RowId::Classifier { index: 0 },
                    })
                } else {
                    let s = sample_aggregated(&spec, m, &prior, Some(n_blocks), seed)?;
                    let sel = select(Algorithm::Mdl, &s.table_entries(), m, &theta)?;
                    Ok(TrialStats {
                        m_hard: s.m_hard,
                        block_mins: s.min_error_per_block(n_blocks),
                        suboptimal: sel.id != RowId::Classifier { index: 0 },
                    })
                }
            })
            .collect()
    };
    let explicit = collect(true)?;
    let aggregated = collect(false)?;

    let histogram = |values: &mut dyn Iterator<Item = u64>| -> Vec<(u64, u64)> {
        let mut map = BTreeMap::new();
        for v in values {
            *map.entry(v).or_insert(0u64) += 1;
        }
        map.into_iter().collect()
    };

    let mut result = ExperimentResult::new();
    let push_stat = |name: &str,
                     a: Vec<(u64, u64)>,
                     b: Vec<(u64, u64)>,
                     result: &mut ExperimentResult|
     -> Result<()> {
        let r = chi_square_two_sample(&a, &b)?;
        if r.p_value <= thresholds::ORACLE_P {
            result.stat_failures.push(format!(
                "{name}: two-sample chi-square p={} at or below {}",
                r.p_value,
                thresholds::ORACLE_P
            ));
        }
        result.rows.push(TrialRow {
            experiment: cfg.experiment.name().to_string(),
            m,
            trial: result.rows.len() as u64,
            seed: cfg.seed,
            algorithm: "CHI2".to_string(),
            selected: name.to_string(),
            errors: Some(r.degrees_of_freedom as u64),
            empirical_error: Some(r.p_value),
            true_error: None,
            true_error_ci_lo: None,
            true_error_ci_hi: None,
            score_bits: Some(r.statistic),
            zero_error_event: None,
            warnings: String::new(),
        });
        Ok(())
    };

    push_stat(
        "hard-count",
        histogram(&mut explicit.iter().map(|s| s.m_hard)),
        histogram(&mut aggregated.iter().map(|s| s.m_hard)),
        &mut result,
    )?;
    let code = |s: &TrialStats| {
        s.block_mins
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as u64 + 1) * 100 + v.min(99))
            .collect::<Vec<u64>>()
    };
    push_stat(
        "block-min-error",
        histogram(&mut explicit.iter().flat_map(code)),
        histogram(&mut aggregated.iter().flat_map(code)),
        &mut result,
    )?;
    push_stat(
        "two-part-selection",
        histogram(&mut explicit.iter().map(|s| s.suboptimal as u64)),
        histogram(&mut aggregated.iter().map(|s| s.suboptimal as u64)),
        &mut result,
    )?;

    result.timings.push(TimingRow {
        experiment: cfg.experiment.name().to_string(),
        m,
        trial: 0,
        wall_ms: started.elapsed().as_millis(),
    });
    result.summaries = summarize(&result.rows, spec.mu, spec.mu_prime);
    Ok(result)
}

// ---------------------------------------------------------------------
// occam-check
// ---------------------------------------------------------------------

fn run_occam_check(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let spec = cfg.problem()?;
    let prior = cfg.classifier_prior()?;
    let m = *cfg.m_list.iter().max().expect("validated nonempty");
    let k = cfg.k_classifiers;

    let outputs: Vec<(TrialRow, TimingRow)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<(TrialRow, TimingRow)> {
            let started = Instant::now();
            let seed = trial_seed(cfg.seed, cfg.experiment, m, trial);
            let sample = sample_explicit(&spec, m as usize, k as usize, seed);
            let counts = sample.error_counts();
            let mut violators = 0u64;
            let mut min_margin = f64::INFINITY;
            for (j, &errors) in counts.iter().enumerate() {
                let bound = occam_bound(prior.log2_prior(j as u64), errors, m, cfg.delta)?;
                let margin = bound - spec.true_error(j as u64);
                min_margin = min_margin.min(margin);
                if margin < 0.0 {
                    violators += 1;
                }
            }
            let row = TrialRow {
                experiment: cfg.experiment.name().to_string(),
                m,
                trial,
                seed,
                algorithm: "BOUND".to_string(),
                selected: format!("classifiers={}", counts.len()),
                errors: Some(violators),
                empirical_error: Some(f64::from(violators > 0)),
                true_error: None,
                true_error_ci_lo: None,
                true_error_ci_hi: None,
                score_bits: Some(min_margin),
                zero_error_event: None,
                warnings: String::new(),
            };
            let timing = TimingRow {
                experiment: cfg.experiment.name().to_string(),
                m,
                trial,
                wall_ms: started.elapsed().as_millis(),
            };
            Ok((row, timing))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut result = ExperimentResult::new();
    for (row, timing) in outputs {
        result.rows.push(row);
        result.timings.push(timing);
    }
    sort_rows(&mut result.rows);
    result.timings.sort_by_key(|t| (t.m, t.trial));
    result.summaries = summarize(&result.rows, spec.mu, spec.mu_prime);

    let violating_trials = result
        .rows
        .iter()
        .filter(|r| r.empirical_error == Some(1.0))
        .count() as f64;
    let frac = violating_trials / cfg.trials as f64;
    let sigma = (cfg.delta * (1.0 - cfg.delta) / cfg.trials as f64).sqrt();
    if frac > cfg.delta + 3.0 * sigma {
        result.stat_failures.push(format!(
            "bound violated in {frac} of trials, above delta + 3 sigma = {}",
            cfg.delta + 3.0 * sigma
        ));
    }
    Ok(result)
}

// ---------------------------------------------------------------------
// shared diagnostic used by the acceptance suite and the binary
// ---------------------------------------------------------------------

/// Verify the three algebraic forms of the noisy-channel predictive
/// probability agree on a grid; returns the maximum absolute discrepancy.
pub fn logistic_grid_discrepancy(grid_points: u32) -> f64 {
    let mut worst = 0.0f64;
    for i in 1..=grid_points {
        let theta = i as f64 / (grid_points + 1) as f64;
        for c_out in [false, true] {
            for y in [false, true] {
                let (direct, logit, symmetric) = logistic_equivalents(theta, c_out, y);
                worst = worst
                    .max((direct - logit).abs())
                    .max((direct - symmetric).abs());
            }
        }
    }
    worst
}
