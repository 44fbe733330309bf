//! Seeded experiment runners built on [`crate::model`].
//!
//! Nothing here touches the filesystem; results are plain values for the
//! command-line layer to serialise.

mod ensemble;
mod properties;
mod snapshot;
mod trajectory;

pub use ensemble::{boundary_replica, boundary_variance_curve, curve_stream, EnsembleEstimate};
pub use properties::{
    property_macqueen_cvt, property_non_collapse, property_non_convergence,
    property_non_convergence_with, property_non_extinction, property_non_extinction_with,
    MacqueenOptions, NonCollapseOptions, NonConvergenceOptions, NonExtinctionOptions, PropertyKind,
    PropertyReport,
};
pub use snapshot::{cloud_snapshot, Segment, Snapshot, SnapshotExemplar, DEFAULT_GRID};
pub use trajectory::{run_trajectory, TrajectoryPoint, TrajectoryRecord};
