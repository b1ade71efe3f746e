//! Command-line entry point.
//!
//! `occamlab <experiment> [--config file.json] [overrides...]`
//!
//! Exit codes: 0 success; 1 usage or configuration error; 2 hard
//! invariant failure; 3 statistical failure under `--strict`.

use clap::Parser;
use occamlab_cli::config::{ExperimentConfig, ExperimentId, ModeChoice, CONFIG_KEYS};
use occamlab_cli::experiments;
use occamlab_cli::output;
use std::path::PathBuf;
use std::process::ExitCode;

fn config_key_help() -> String {
    let mut s =
        String::from("Config file keys (flat JSON object; dotted names are literal keys):\n");
    for k in CONFIG_KEYS {
        s.push_str(&format!("  {:<22} {}\n", k.key, k.doc));
    }
    s.push_str("\nCommand-line flags override config keys.");
    s
}

#[derive(Parser, Debug)]
#[command(
    name = "occamlab",
    version,
    about = "Monte-Carlo experiment harness for label-noise model selection",
    after_long_help = config_key_help()
)]
struct Cli {
    /// Experiment to run: inconsistency | orb-consistency | sequential |
    /// evidence-bracket | kl-calibration | region-sweep | oracle-compare | occam-check
    experiment: String,

    /// Flat JSON config file (see --help for the key table)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,

    /// Sample sizes override (repeatable)
    #[arg(long = "m", value_name = "M")]
    m_list: Vec<u64>,

    /// Trials-per-sample-size override
    #[arg(long)]
    trials: Option<u64>,

    /// Sampling mode override: auto | explicit | aggregated
    #[arg(long)]
    mode: Option<String>,

    /// Output directory override
    #[arg(long)]
    out: Option<PathBuf>,

    /// Exit nonzero when a statistical threshold is missed
    #[arg(long)]
    strict: bool,

    /// Echo rows.csv to standard output (telemetry stays on stderr)
    #[arg(long)]
    stdout: bool,
}

fn build_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let experiment = ExperimentId::parse(&cli.experiment)?;
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(experiment, path)?,
        None => ExperimentConfig::defaults(experiment),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if !cli.m_list.is_empty() {
        cfg.m_list = cli.m_list.clone();
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(mode) = &cli.mode {
        cfg.mode = ModeChoice::parse(mode)?;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.display().to_string();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version requests to stdout with success.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e:#}");
            return ExitCode::from(1);
        }
    };

    eprintln!(
        "running {} (seed {}, {} sample size(s), {} trial(s), mode {})",
        cfg.experiment.name(),
        cfg.seed,
        cfg.m_list.len(),
        cfg.trials,
        cfg.mode.name()
    );

    let result = match experiments::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("run failed: {e:#}");
            return ExitCode::from(2);
        }
    };

    let dir = PathBuf::from(&cfg.out_dir);
    if let Err(e) = output::write_run(
        &dir,
        &cfg,
        &result.rows,
        &result.summaries,
        &result.region,
        &result.timings,
    ) {
        eprintln!("writing outputs failed: {e:#}");
        return ExitCode::from(2);
    }
    eprintln!(
        "wrote {} rows, {} summaries to {}",
        result.rows.len(),
        result.summaries.len(),
        dir.display()
    );

    if cli.stdout {
        print!("{}", output::rows_csv(&result.rows));
    }

    for f in &result.hard_failures {
        eprintln!("invariant failure: {f}");
    }
    for f in &result.stat_failures {
        eprintln!("statistical check missed: {f}");
    }

    if !result.hard_failures.is_empty() {
        ExitCode::from(2)
    } else if cli.strict && !result.stat_failures.is_empty() {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
