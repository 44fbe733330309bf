use crate::error::{Error, Result};
use crate::geometry::boundary_1d;
use crate::model::{ModelConfig, Points, Simulation, SystemState};
use crate::rng::replica_stream;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub step: u64,
    pub means: Points,
    pub weights: Vec<f64>,
    /// `(x₁ + x₂)/2` for one-dimensional two-category runs.
    pub boundary: Option<f64>,
}

impl TrajectoryPoint {
    fn of(state: &SystemState) -> Self {
        Self {
            step: state.step_count(),
            means: state.means().clone(),
            weights: state.weights().to_vec(),
            boundary: boundary_1d(state).ok(),
        }
    }
}

/// States at steps `0, stride, 2·stride, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub stride: u64,
    pub points: Vec<TrajectoryPoint>,
}

/// Iterate the model `n_steps` times from the configured initial state on
/// replica stream 0 of `config.seed`.
pub fn run_trajectory(config: &ModelConfig, n_steps: u64, stride: u64) -> Result<TrajectoryRecord> {
    if stride == 0 {
        return Err(Error::Parameter("stride must be >= 1".into()));
    }
    let mut sim = Simulation::new(config, replica_stream(config.seed, 0))?;
    let mut points = Vec::with_capacity((n_steps / stride + 1) as usize);
    points.push(TrajectoryPoint::of(sim.state()));
    for n in 1..=n_steps {
        sim.next()?;
        if n % stride == 0 {
            points.push(TrajectoryPoint::of(sim.state()));
        }
    }
    Ok(TrajectoryRecord { stride, points })
}
