//! `occamlab` — a laboratory for studying codelength-based model selection
//! under label noise.
//!
//! The crate implements one synthetic binary-classification family end to
//! end:
//!
//! * a **problem generator** ([`problem`], [`aggregate`]) that produces
//!   training samples over a countable pool of feature classifiers, either
//!   explicitly (one column per classifier) or in an aggregated form that
//!   scales to pools of astronomically many classifiers;
//! * **priors** ([`prior`]) over classifier indices and over the noise
//!   parameter of a coin-flip corruption channel;
//! * **inference primitives** ([`inference`]) — likelihoods, marginal
//!   evidence, codelengths, posterior tables — implemented in log space;
//! * **learners** ([`learners`], [`bayes`]) — penalized-codelength
//!   selectors (MAP, sMAP, MDL, ORB), the full Bayes predictor, and a
//!   sequential Bayes mistake counter;
//! * small exactly-solvable **toy problems** ([`toy`]) for KL-divergence
//!   ground truth, and supporting **statistics** ([`stats`]).
//!
//! All randomness flows through the counter-based generator in [`rng`],
//! keyed by explicit `(seed, path)` derivations so that every experiment,
//! trial, and stream is independently reproducible.

pub mod aggregate;
pub mod bayes;
pub mod inference;
pub mod learners;
pub mod logspace;
pub mod prior;
pub mod problem;
pub mod rng;
pub mod stats;
pub mod toy;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter was outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The requested operation is not defined for this input combination.
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
