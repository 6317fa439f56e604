//! Occupancy statistics, stationary distributions, approximation of finite
//! distributions by labeled wheels, and synchronizing-word search.
//!
//! Two occupancy notions are kept apart on purpose. [`path_count_occupancy`]
//! treats a machine as nondeterministic and counts paths, while
//! [`stationary_distribution`] and [`monte_carlo_occupancy`] read it as a
//! Markov chain with uniform choice among successors. On the looped 2-wheel
//! the first tends to `1/φ ≈ 0.618` and the second to `2/3`.

mod approx;
mod occupancy;
mod stationary;
mod sync;

pub use approx::{approximate_distribution, Approximation, FiniteDistribution};
pub use occupancy::{
    cycle_occupancy, monte_carlo_occupancy, path_count_occupancy, Fractions, OccupancyEntry,
    OccupancyReport, OccupancyVector, EXACT_PATH_LIMIT,
};
pub use stationary::{stationary_distribution, stationary_residual};
pub use sync::{synchronizing_word, synchronizing_word_with, SyncOptions, SyncWord};
