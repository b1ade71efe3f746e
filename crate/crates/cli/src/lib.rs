//! Library surface of the experiment harness.
//!
//! The binary is a thin wrapper: configuration parsing, experiment
//! orchestration, and output emission all live here so the test suite can
//! drive them directly.

pub mod config;
pub mod experiments;
pub mod output;
