//! Experiment harness for label-efficient two-sample testing.
//!
//! Builds on [`le2st_core`]: generates synthetic two-class data behind a
//! metered label oracle, drives the seed/query/test pipeline, estimates
//! Type I/II error rates over repeated trials, and renders plot-ready
//! CSV. Trials run in parallel; per-trial seeds are a pure function of
//! the master seed and the trial index, so outputs are byte-identical
//! regardless of thread count.

pub mod config;
pub mod csvfmt;
pub mod error;
pub mod oracle;
pub mod pipeline;
pub mod runner;
pub mod seeding;
pub mod synth;

pub use error::{Error, Result};
