//! Uniform dispersion of robots on the integer grid.
//!
//! Robots enter an unknown region one at a time through a source cell and
//! must eventually occupy every cell. This crate holds the environment model,
//! the Look-Compute-Move engine, the dispersion policies, metric computation
//! and a TASEP simulator used to bound the asynchronous dynamics.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algorithms;
pub mod engine;
pub mod environment;
pub mod grid;
pub mod invariants;
pub mod metrics;
pub mod rng;
pub mod tasep;

pub use algorithms::Algorithm;
pub use engine::{run, Capabilities, EngineError, Policy, RunOutcome, RunOutput, Schedule, World};
pub use environment::{EnvError, Environment, Region, VertexClass};
pub use grid::{Cell, Direction, Offset};
pub use metrics::{compute_metrics, optimal_baselines, MetricsReport, OptimalBaselines};
