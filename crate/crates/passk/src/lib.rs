//! Simulation library for Pass@k inference selection.
//!
//! An inference run samples `N` candidate responses from a reference policy,
//! then submits up to `k` of them. This crate models that setting on finite
//! response universes and provides:
//!
//! - the four selection rules: majority voting, weighted majority voting,
//!   Best-of-N, and Best-of-Majority (frequency filter + top-k rewards);
//! - Monte Carlo regret estimation with deterministic, parallel-safe seeding,
//!   plus an exact enumeration oracle for tiny instances;
//! - generators for the adversarial instances on which majority voting and
//!   Best-of-N provably fail to scale;
//! - closed-form regret/probability bounds with explicit constants, and a
//!   Monte Carlo check of the frequency-sandwich event they rely on;
//! - an ingest path that scores the same strategies on pre-sampled,
//!   pre-clustered trajectory logs.
//!
//! The `passk` binary exposes all of it behind `simulate`, `sweep`,
//! `hard-instance`, `verify-bounds`, `empirical`, and `enumerate`.

// Parameter checks use the negated form `!(x >= bound)` so that NaN inputs
// fall into the error path instead of slipping through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
mod error;
pub mod hard_instances;
pub mod ingest;
pub mod instance;
pub mod rng;
pub mod simulation;
pub mod strategies;
pub mod svg;

pub use error::{Error, Result};
pub use instance::{DerivedStats, Instance, Violation};
pub use simulation::{MonotonicityReport, RegretEstimate, SweepResult, SweepRow};
pub use strategies::{AlphaSpec, SampleBatch, StrategySpec, WeightFn};
