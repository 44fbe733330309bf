use crate::cloud::ExemplarCloud;
use crate::error::{Error, Result};
use crate::model::{nearest, ModelConfig, Points, Simulation};
use crate::rng::replica_stream;

/// Grid resolution per axis for drawing cell boundaries.
pub const DEFAULT_GRID: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotExemplar {
    pub category: usize,
    pub location: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub from: [f64; 2],
    pub to: [f64; 2],
}

/// Plot data of a two-dimensional run.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub prune_threshold: f64,
    pub exemplars: Vec<SnapshotExemplar>,
    pub means: Points,
    pub weights: Vec<f64>,
    /// Grid-cell edges separating differently classified neighbours.
    pub boundary: Vec<Segment>,
}

/// Run a two-dimensional model for `n_steps`, tracking individual exemplars,
/// and return those heavier than `prune_threshold` with the means and the
/// Voronoi boundary traced on a `grid × grid` lattice.
///
/// `initial` lists the starting exemplars as `(category, location, weight)`;
/// when empty each category starts as a single exemplar at its mean carrying
/// the category weight.
pub fn cloud_snapshot(
    config: &ModelConfig,
    initial: &[(usize, Vec<f64>, f64)],
    n_steps: u64,
    prune_threshold: f64,
    grid: usize,
) -> Result<Snapshot> {
    if config.domain.dim() != 2 {
        return Err(Error::Contract(format!(
            "snapshots are two-dimensional, got dimension {}",
            config.domain.dim()
        )));
    }
    if !(prune_threshold >= 0.0) {
        return Err(Error::Parameter(format!(
            "prune threshold must be >= 0, got {prune_threshold}"
        )));
    }
    if grid < 2 {
        return Err(Error::Parameter(
            "grid must have at least 2 cells per axis".into(),
        ));
    }
    let decay = config.decay();
    let mut cloud = ExemplarCloud::new(2, config.k, prune_threshold);
    if initial.is_empty() {
        for (i, (m, w)) in config
            .init_means
            .iter()
            .zip(&config.init_weights)
            .enumerate()
        {
            cloud.insert(i, m, *w);
        }
    } else {
        for (i, loc, w) in initial {
            if *i >= config.k {
                return Err(Error::Parameter(format!(
                    "initial exemplar category {i} >= k = {}",
                    config.k
                )));
            }
            config.domain.check(loc)?;
            cloud.insert(*i, loc, *w);
        }
    }

    let mut sim = Simulation::new(config, replica_stream(config.seed, 0))?;
    for _ in 0..n_steps {
        let i = sim.next()?;
        cloud.record(i, sim.last_exemplar(), decay);
    }
    let state = sim.into_state();

    let exemplars = (0..config.k)
        .flat_map(|i| {
            cloud
                .live(i)
                .iter()
                .filter(|e| e.weight > prune_threshold)
                .map(move |e| SnapshotExemplar {
                    category: i,
                    location: e.location.clone(),
                    weight: e.weight,
                })
        })
        .collect();

    Ok(Snapshot {
        step: state.step_count(),
        prune_threshold,
        exemplars,
        boundary: grid_boundary(config, state.means(), grid),
        means: state.means().clone(),
        weights: state.weights().to_vec(),
    })
}

fn grid_boundary(config: &ModelConfig, means: &Points, grid: usize) -> Vec<Segment> {
    let (lo, hi) = (config.domain.lower(), config.domain.upper());
    let hx = (hi[0] - lo[0]) / grid as f64;
    let hy = (hi[1] - lo[1]) / grid as f64;
    let edge_x = |i: usize| lo[0] + i as f64 * hx;
    let edge_y = |j: usize| lo[1] + j as f64 * hy;
    let labels: Vec<usize> = (0..grid)
        .flat_map(|j| (0..grid).map(move |i| (i, j)))
        .map(|(i, j)| nearest(&[edge_x(i) + 0.5 * hx, edge_y(j) + 0.5 * hy], means))
        .collect();
    let label = |i: usize, j: usize| labels[j * grid + i];
    let mut segments = Vec::new();
    for j in 0..grid {
        for i in 0..grid {
            if i + 1 < grid && label(i, j) != label(i + 1, j) {
                let x = edge_x(i + 1);
                segments.push(Segment {
                    from: [x, edge_y(j)],
                    to: [x, edge_y(j + 1)],
                });
            }
            if j + 1 < grid && label(i, j) != label(i, j + 1) {
                let y = edge_y(j + 1);
                segments.push(Segment {
                    from: [edge_x(i), y],
                    to: [edge_x(i + 1), y],
                });
            }
        }
    }
    segments
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DistributionSpec, Domain};

    fn square_config(lambda: f64) -> ModelConfig {
        ModelConfig {
            k: 2,
            lambda,
            domain: Domain::cube(2, 0.0, 100.0),
            dist: DistributionSpec::Uniform,
            init_means: Points::from_rows(&[[25.0, 50.0], [75.0, 50.0]]).unwrap(),
            init_weights: vec![1.0, 1.0],
            seed: 4,
        }
    }

    #[test]
    fn no_decay_keeps_every_exemplar() {
        for n in [100u64, 400] {
            let s = cloud_snapshot(&square_config(0.0), &[], n, 0.01, 16).unwrap();
            assert_eq!(s.exemplars.len() as u64, n + 2);
        }
    }

    #[test]
    fn decay_caps_plotted_exemplars() {
        let lambda: f64 = 0.05;
        let s = cloud_snapshot(&square_config(lambda), &[], 3000, 0.01, 16).unwrap();
        // weight e^{-λa} > 0.01 iff age a < ln(100)/λ ≈ 92.1
        let ages = (100f64.ln() / lambda).ceil() as usize;
        assert!(
            s.exemplars.len() <= ages && s.exemplars.len() + 1 >= ages,
            "{}",
            s.exemplars.len()
        );
        assert!(s.exemplars.iter().all(|e| e.weight > 0.01));
    }

    #[test]
    fn zero_threshold_emits_everything() {
        let s = cloud_snapshot(&square_config(0.05), &[], 500, 0.0, 16).unwrap();
        assert_eq!(s.exemplars.len(), 502);
    }

    #[test]
    fn boundary_of_two_cells_is_the_bisector() {
        let mut config = square_config(0.0);
        config.init_weights = vec![1e12, 1e12];
        let s = cloud_snapshot(&config, &[], 1, 0.01, 64).unwrap();
        let bisector = 0.5 * (s.means.get(0)[0] + s.means.get(1)[0]);
        assert_eq!(s.boundary.len(), 64);
        for seg in &s.boundary {
            assert_eq!(seg.from[0], seg.to[0]);
            assert!((seg.from[0] - bisector).abs() <= 100.0 / 64.0);
        }
    }

    #[test]
    fn rejects_one_dimensional_configs() {
        let config = ModelConfig::two_category_unit(0.1, [0.2, 0.8], [1.0, 1.0], 0).unwrap();
        assert!(matches!(
            cloud_snapshot(&config, &[], 1, 0.01, 8),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn initial_exemplars_are_plotted() {
        let init = vec![
            (0, vec![24.0, 50.0], 1.0),
            (0, vec![26.0, 50.0], 1.0),
            (1, vec![75.0, 50.0], 2.0),
        ];
        let s = cloud_snapshot(&square_config(0.0), &init, 0, 0.01, 8).unwrap();
        assert_eq!(s.exemplars.len(), 3);
        assert!(
            cloud_snapshot(&square_config(0.0), &[(5, vec![1.0, 1.0], 1.0)], 0, 0.01, 8).is_err()
        );
    }
}
