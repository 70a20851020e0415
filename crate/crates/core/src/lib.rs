//! Deterministic discrete-event simulation of AODV ad-hoc networks with
//! black-hole attackers.
//!
//! A run is a pure function of its [`ScenarioConfig`] and seed: the same
//! inputs produce the same event trace and the same [`RunMetrics`] on every
//! platform. See the guide in `book/` for a walk-through of each layer.
//!
//! ```
//! use manet_sim::{config::ScenarioConfig, sim};
//!
//! let cfg = ScenarioConfig::parse("duration = 20\nmobility.model = static\n").unwrap();
//! let metrics = sim::run(&cfg).unwrap();
//! assert!(metrics.is_conserved());
//! ```

use std::fmt;

pub mod aodv;
pub mod blackhole;
pub mod config;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod mobility;
pub mod radio;
pub mod rng;
pub mod sim;
pub mod traffic;

pub use config::ScenarioConfig;
pub use error::{Result, SimError};
pub use traffic::RunMetrics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
