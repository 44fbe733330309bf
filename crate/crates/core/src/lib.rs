//! Online nearest-mean classification with exponentially decaying category
//! weights ("exemplar dynamics"), the AR(1) model of the two-category
//! boundary, and a seeded Monte Carlo harness for both.
//!
//! - [`model`]: state, update rule, sampling
//! - [`geometry`]: Voronoi cell statistics and the 1-D boundary
//! - [`ar1`]: fixed point, linearisation and boundary AR(1) closed forms
//! - [`harness`]: trajectories, ensembles, long-run property checks, snapshots
//! - [`presets`]: the canonical experiment configurations

pub mod ar1;
pub mod cloud;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod model;
pub mod presets;
pub mod rng;

pub use ar1::{Ar1Params, Ar1Process, Horizon};
pub use cloud::{Exemplar, ExemplarCloud};
pub use error::{Error, Result};
pub use geometry::{CellStats, CentroidalDeviation};
pub use model::{
    classify, limit_weight, weight_bound, Decay, Density, DistributionSpec, Domain, ModelConfig,
    Points, Simulation, SystemState,
};
