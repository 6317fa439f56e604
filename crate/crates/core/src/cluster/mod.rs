//! Clusters of Moore machines nested across timescales.
//!
//! A [`ClusterNode`] holds a machine at one timescale and, per state, inner
//! nodes on strictly faster scales. [`tick`] advances the whole tree by one
//! elementary tick. [`cycle_length`] and [`classify`] describe the temporal
//! structure a cluster or a single machine produces.

mod bisim;
mod classify;
mod cycle;
mod node;
mod scales;
mod sim;

pub use bisim::{bisimilar, quotient, Bisimulation};
pub use classify::{
    canonical, classify, classify_cluster, classify_with, default_horizon, product, Family,
    Openness, TemporalClass,
};
pub use cycle::{
    cycle_length, first_return, prime_power_construction, wheel_cluster_cycle, CycleLength,
    WheelCluster, ENUMERATION_LIMIT, VERIFY_LIMIT,
};
pub use node::{validate_cluster, ClusterDoc, ClusterNode, ClusterViolation, TickPolicy};
pub use scales::{ScaleSystem, NAIVE_SCALE_NAMES};
pub use sim::{simulate, tick, tick_mut, unfold, ClusterState, NodeState, SimulationReport, TickOutput};
