//! Experiment configuration: a flat JSON object with documented keys
//! (dotted names are literal keys, not nesting), command-line overrides,
//! validation, and a stable content hash echoed into run metadata.

use anyhow::{anyhow, bail, Context, Result};
use occamlab::prior::{ClassifierPrior, ThetaPrior};
use occamlab::problem::ProblemSpec;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Experiment identifiers accepted on the command line and in the
/// `experiment` config key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    Inconsistency,
    OrbConsistency,
    Sequential,
    EvidenceBracket,
    KlCalibration,
    RegionSweep,
    OracleCompare,
    OccamCheck,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::Inconsistency,
        ExperimentId::OrbConsistency,
        ExperimentId::Sequential,
        ExperimentId::EvidenceBracket,
        ExperimentId::KlCalibration,
        ExperimentId::RegionSweep,
        ExperimentId::OracleCompare,
        ExperimentId::OccamCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Inconsistency => "inconsistency",
            ExperimentId::OrbConsistency => "orb-consistency",
            ExperimentId::Sequential => "sequential",
            ExperimentId::EvidenceBracket => "evidence-bracket",
            ExperimentId::KlCalibration => "kl-calibration",
            ExperimentId::RegionSweep => "region-sweep",
            ExperimentId::OracleCompare => "oracle-compare",
            ExperimentId::OccamCheck => "occam-check",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                anyhow!(
                    "unknown experiment {s:?}; expected one of: {}",
                    Self::ALL.map(|e| e.name()).join(", ")
                )
            })
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sampling mode. `Auto` resolves per sample size: aggregated from
/// `m >= 64`, explicit below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChoice {
    Auto,
    Explicit,
    Aggregated,
}

impl ModeChoice {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(ModeChoice::Auto),
            "explicit" => Ok(ModeChoice::Explicit),
            "aggregated" => Ok(ModeChoice::Aggregated),
            other => bail!("unknown mode {other:?}; expected auto, explicit, or aggregated"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModeChoice::Auto => "auto",
            ModeChoice::Explicit => "explicit",
            ModeChoice::Aggregated => "aggregated",
        }
    }

    /// Whether sampling at this `m` uses the aggregated representation.
    pub fn aggregated_at(self, m: u64) -> bool {
        match self {
            ModeChoice::Auto => m >= 64,
            ModeChoice::Explicit => false,
            ModeChoice::Aggregated => true,
        }
    }
}

/// One documented configuration key.
pub struct KeyDoc {
    pub key: &'static str,
    pub doc: &'static str,
}

/// Every key accepted in config files; `--help` prints this table.
pub const CONFIG_KEYS: &[KeyDoc] = &[
    KeyDoc {
        key: "experiment",
        doc: "experiment id (also the subcommand)",
    },
    KeyDoc {
        key: "mu",
        doc: "true error of the good classifier (0,1)",
    },
    KeyDoc {
        key: "mu_prime",
        doc: "true error of every bad classifier [mu, mu_hard]",
    },
    KeyDoc {
        key: "mu_hard",
        doc: "bad-classifier error rate on hard examples [1/2, 1]",
    },
    KeyDoc {
        key: "prior.classifier",
        doc: "classifier prior: dyadic | universal | polynomial",
    },
    KeyDoc {
        key: "prior.degree",
        doc: "polynomial prior degree (>= 1; used with polynomial)",
    },
    KeyDoc {
        key: "prior.theta.alpha",
        doc: "Beta noise-prior alpha (> 0)",
    },
    KeyDoc {
        key: "prior.theta.beta",
        doc: "Beta noise-prior beta (> 0)",
    },
    KeyDoc {
        key: "prior.theta.floor",
        doc: "noise-prior density floor in [0,1)",
    },
    KeyDoc {
        key: "prior.theta.point",
        doc: "point-mass noise prior at this rate (overrides Beta keys)",
    },
    KeyDoc {
        key: "m_list",
        doc: "sample sizes to run (array of positive integers)",
    },
    KeyDoc {
        key: "trials",
        doc: "independent trials per sample size (>= 1)",
    },
    KeyDoc {
        key: "seed",
        doc: "master seed; trial seeds derive deterministically",
    },
    KeyDoc {
        key: "mode",
        doc: "sampling mode: auto | explicit | aggregated",
    },
    KeyDoc {
        key: "out_dir",
        doc: "output directory for rows.csv / summary.csv / meta.json",
    },
    KeyDoc {
        key: "m_test",
        doc: "Monte-Carlo test points for the Bayes arm (0 disables it)",
    },
    KeyDoc {
        key: "delta",
        doc: "confidence/slack parameter for bound experiments (0,1)",
    },
    KeyDoc {
        key: "alpha",
        doc: "margin for the evidence-sandwich precondition (0, 0.5)",
    },
    KeyDoc {
        key: "k_classifiers",
        doc: "materialized bad classifiers in explicit mode (>= 1)",
    },
    KeyDoc {
        key: "n_max",
        doc: "aggregated-mode block horizon override (optional)",
    },
];

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub mu: f64,
    pub mu_prime: f64,
    pub mu_hard: f64,
    pub prior_classifier: String,
    pub prior_degree: u32,
    pub theta_alpha: f64,
    pub theta_beta: f64,
    pub theta_floor: f64,
    pub theta_point: Option<f64>,
    pub m_list: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
    pub mode: ModeChoice,
    pub out_dir: String,
    pub m_test: u64,
    pub delta: f64,
    pub alpha: f64,
    pub k_classifiers: u64,
    pub n_max: Option<u32>,
}

impl ExperimentConfig {
    /// Baseline configuration for an experiment: the synthetic problem at
    /// its reference setting, dyadic prior, uniform noise prior.
    pub fn defaults(experiment: ExperimentId) -> Self {
        let mut cfg = ExperimentConfig {
            experiment,
            mu: 0.2,
            mu_prime: 0.3,
            mu_hard: 0.5,
            prior_classifier: "dyadic".to_string(),
            prior_degree: 2,
            theta_alpha: 1.0,
            theta_beta: 1.0,
            theta_floor: 0.0,
            theta_point: None,
            m_list: vec![4096],
            trials: 50,
            seed: 0,
            mode: ModeChoice::Auto,
            out_dir: format!("runs/{}", experiment.name()),
            m_test: 0,
            delta: 0.05,
            alpha: 0.05,
            k_classifiers: 4095,
            n_max: None,
        };
        match experiment {
            ExperimentId::Inconsistency => {}
            ExperimentId::OrbConsistency => cfg.m_list = vec![16384],
            ExperimentId::Sequential => cfg.m_list = vec![2000],
            ExperimentId::EvidenceBracket => {
                cfg.m_list = vec![50, 100, 200, 400, 800, 1000];
                cfg.trials = 1;
            }
            ExperimentId::KlCalibration => {
                cfg.m_list = vec![0];
                cfg.trials = 5;
            }
            ExperimentId::RegionSweep => {
                cfg.m_list = vec![1024];
                cfg.trials = 20;
            }
            ExperimentId::OracleCompare => {
                cfg.m_list = vec![32];
                cfg.trials = 200;
            }
            ExperimentId::OccamCheck => {
                cfg.m_list = vec![100];
                cfg.trials = 1000;
                cfg.k_classifiers = 63;
            }
        }
        cfg
    }

    /// Parse a flat JSON config file and fold it over the defaults.
    pub fn from_file(experiment: ExperimentId, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let value: Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| anyhow!("config root must be a JSON object"))?;
        let mut cfg = Self::defaults(experiment);
        for (key, v) in obj {
            cfg.apply_key(key, v)?;
        }
        Ok(cfg)
    }

    /// Apply one `key = value` pair (config file entry or CLI override).
    pub fn apply_key(&mut self, key: &str, v: &Value) -> Result<()> {
        fn num(key: &str, v: &Value) -> Result<f64> {
            v.as_f64()
                .ok_or_else(|| anyhow!("config key {key:?} must be a number, got {v}"))
        }
        fn uint(key: &str, v: &Value) -> Result<u64> {
            v.as_u64().ok_or_else(|| {
                anyhow!("config key {key:?} must be a non-negative integer, got {v}")
            })
        }
        fn string(key: &str, v: &Value) -> Result<String> {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| anyhow!("config key {key:?} must be a string, got {v}"))
        }
        match key {
            "experiment" => {
                let id = ExperimentId::parse(&string(key, v)?)?;
                if id != self.experiment {
                    bail!(
                        "config is for experiment {:?} but {:?} was requested",
                        id.name(),
                        self.experiment.name()
                    );
                }
            }
            "mu" => self.mu = num(key, v)?,
            "mu_prime" => self.mu_prime = num(key, v)?,
            "mu_hard" => self.mu_hard = num(key, v)?,
            "prior.classifier" => self.prior_classifier = string(key, v)?,
            "prior.degree" => self.prior_degree = uint(key, v)? as u32,
            "prior.theta.alpha" => self.theta_alpha = num(key, v)?,
            "prior.theta.beta" => self.theta_beta = num(key, v)?,
            "prior.theta.floor" => self.theta_floor = num(key, v)?,
            "prior.theta.point" => self.theta_point = Some(num(key, v)?),
            "m_list" => {
                let arr = v
                    .as_array()
                    .ok_or_else(|| anyhow!("config key \"m_list\" must be an array"))?;
                self.m_list = arr
                    .iter()
                    .map(|x| uint("m_list", x))
                    .collect::<Result<Vec<_>>>()?;
            }
            "trials" => self.trials = uint(key, v)?,
            "seed" => self.seed = uint(key, v)?,
            "mode" => self.mode = ModeChoice::parse(&string(key, v)?)?,
            "out_dir" => self.out_dir = string(key, v)?,
            "m_test" => self.m_test = uint(key, v)?,
            "delta" => self.delta = num(key, v)?,
            "alpha" => self.alpha = num(key, v)?,
            "k_classifiers" => self.k_classifiers = uint(key, v)?,
            "n_max" => self.n_max = Some(uint(key, v)? as u32),
            other => bail!("unknown config key {other:?}; run with --help for the key table"),
        }
        Ok(())
    }

    /// Validate every referenced parameter before any sampling starts.
    pub fn validate(&self) -> Result<()> {
        self.problem()
            .map_err(|e| anyhow!("invalid problem parameters: {e}"))?;
        self.classifier_prior()?;
        self.theta_prior()
            .map_err(|e| anyhow!("invalid noise prior: {e}"))?;
        if self.m_list.is_empty() {
            bail!("m_list must contain at least one sample size");
        }
        if self.experiment != ExperimentId::KlCalibration && self.m_list.iter().any(|&m| m == 0) {
            bail!("sample sizes must be positive");
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            bail!("delta must lie in (0,1), got {}", self.delta);
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            bail!("alpha must lie in (0,0.5), got {}", self.alpha);
        }
        if self.k_classifiers == 0 {
            bail!("k_classifiers must be at least 1");
        }
        if self.experiment == ExperimentId::OracleCompare
            && !(self.k_classifiers + 1).is_power_of_two()
        {
            bail!(
                "oracle-compare needs k_classifiers = 2^n - 1 so explicit blocks are complete (got {})",
                self.k_classifiers
            );
        }
        Ok(())
    }

    pub fn problem(&self) -> occamlab::Result<ProblemSpec> {
        ProblemSpec::new(self.mu, self.mu_prime, self.mu_hard)
    }

    pub fn classifier_prior(&self) -> Result<ClassifierPrior> {
        match self.prior_classifier.as_str() {
            "dyadic" => Ok(ClassifierPrior::DyadicBlock),
            "universal" => Ok(ClassifierPrior::UniversalIntegers),
            "polynomial" => ClassifierPrior::polynomial(self.prior_degree)
                .map_err(|e| anyhow!("invalid polynomial prior: {e}")),
            other => bail!(
                "unknown classifier prior {other:?}; expected dyadic, universal, or polynomial"
            ),
        }
    }

    pub fn theta_prior(&self) -> occamlab::Result<ThetaPrior> {
        match self.theta_point {
            Some(t) => ThetaPrior::point_mass(t),
            None => ThetaPrior::beta(self.theta_alpha, self.theta_beta, self.theta_floor),
        }
    }

    /// The configuration as a flat sorted key/value map: the verbatim echo
    /// placed in run metadata and the input to the config hash.
    pub fn echo_map(&self) -> BTreeMap<String, Value> {
        let mut map = BTreeMap::new();
        map.insert("experiment".into(), self.experiment.name().into());
        map.insert("mu".into(), self.mu.into());
        map.insert("mu_prime".into(), self.mu_prime.into());
        map.insert("mu_hard".into(), self.mu_hard.into());
        map.insert(
            "prior.classifier".into(),
            self.prior_classifier.clone().into(),
        );
        map.insert("prior.degree".into(), self.prior_degree.into());
        map.insert("prior.theta.alpha".into(), self.theta_alpha.into());
        map.insert("prior.theta.beta".into(), self.theta_beta.into());
        map.insert("prior.theta.floor".into(), self.theta_floor.into());
        if let Some(t) = self.theta_point {
            map.insert("prior.theta.point".into(), t.into());
        }
        map.insert("m_list".into(), self.m_list.clone().into());
        map.insert("trials".into(), self.trials.into());
        map.insert("seed".into(), self.seed.into());
        map.insert("mode".into(), self.mode.name().into());
        map.insert("out_dir".into(), self.out_dir.clone().into());
        map.insert("m_test".into(), self.m_test.into());
        map.insert("delta".into(), self.delta.into());
        map.insert("alpha".into(), self.alpha.into());
        map.insert("k_classifiers".into(), self.k_classifiers.into());
        if let Some(n) = self.n_max {
            map.insert("n_max".into(), n.into());
        }
        map
    }

    /// SHA-256 over the canonical `key=value` listing.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        for (k, v) in self.echo_map() {
            hasher.update(k.as_bytes());
            hasher.update(b"=");
            hasher.update(v.to_string().as_bytes());
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
