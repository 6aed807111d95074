//! Experiment plumbing behind the `disperse` binary: environment requests,
//! trial runners, CSV rows, snapshots and plots.

pub mod envspec;
pub mod experiments;
pub mod plot;
pub mod records;
pub mod render;
pub mod stats;

/// An invariant the run was expected to uphold did not hold.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invariant failed: {0}")]
pub struct InvariantFailure(pub String);
