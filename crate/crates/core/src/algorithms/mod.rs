//! Dispersion policies and their registry.

mod asynch;
mod bflf;
mod bfs_tree;
mod dflf;
mod fcdfs;
mod fcdfs5;
mod offline;

use alloc::boxed::Box;
use core::fmt;
use core::str::FromStr;

pub use asynch::{AsynchFcdfs, AsynchState};
pub use bflf::Bflf;
pub use bfs_tree::BfsTree;
pub use dflf::Dflf;
pub use fcdfs::{Fcdfs, FcdfsState};
pub use fcdfs5::{Fcdfs5, Fcdfs5State};
pub use offline::OfflineOptimal;

use crate::engine::{Local, Policy};
use crate::environment::Environment;

/// Every policy selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Fcdfs,
    Fcdfs5,
    AsynchFcdfs,
    Dflf,
    Bflf,
    OfflineOpt,
    BfsTree,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Fcdfs,
        Algorithm::Fcdfs5,
        Algorithm::AsynchFcdfs,
        Algorithm::Dflf,
        Algorithm::Bflf,
        Algorithm::OfflineOpt,
        Algorithm::BfsTree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fcdfs => "fcdfs",
            Algorithm::Fcdfs5 => "fcdfs5",
            Algorithm::AsynchFcdfs => "asynch-fcdfs",
            Algorithm::Dflf => "dflf",
            Algorithm::Bflf => "bflf",
            Algorithm::OfflineOpt => "offline-opt",
            Algorithm::BfsTree => "bfs-tree",
        }
    }

    /// A fresh controller for `env`.
    pub fn policy(self, env: &Environment) -> Box<dyn Policy> {
        match self {
            Algorithm::Fcdfs => Box::new(Local(Fcdfs)),
            Algorithm::Fcdfs5 => Box::new(Local(Fcdfs5)),
            Algorithm::AsynchFcdfs => Box::new(Local(AsynchFcdfs)),
            Algorithm::Dflf => Box::new(Dflf::new(env)),
            Algorithm::Bflf => Box::new(Bflf::new(env)),
            Algorithm::OfflineOpt => Box::new(OfflineOptimal::new()),
            Algorithm::BfsTree => Box::new(BfsTree::new(env)),
        }
    }

    /// Policies that assume every robot acts every step.
    pub fn needs_synchronous(self) -> bool {
        matches!(
            self,
            Algorithm::Fcdfs | Algorithm::Fcdfs5 | Algorithm::Dflf | Algorithm::Bflf
        )
    }

    /// Policies that meet all five optima under synchronous timing. The
    /// decentralized ones need a simply connected region.
    pub fn optimal_when_synchronous(self) -> bool {
        matches!(
            self,
            Algorithm::Fcdfs | Algorithm::Fcdfs5 | Algorithm::AsynchFcdfs | Algorithm::OfflineOpt
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown algorithm {0:?}")]
pub struct UnknownAlgorithm(pub alloc::string::String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownAlgorithm(s.into()))
    }
}
