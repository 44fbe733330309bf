//! Monte Carlo statistics of the Voronoi tessellation generated by the means.
//!
//! Sample points are assigned with the same nearest-mean routine the dynamics
//! use, so estimated cells are exactly the cells the model classifies with.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{nearest, Domain, Points, SystemState};

pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    /// Estimated `|S_i|`, i.e. hit fraction times `|E|`.
    pub volumes: Vec<f64>,
    /// Sample centroid of each cell; `None` when no sample landed in it.
    pub centroids: Vec<Option<Vec<f64>>>,
    pub counts: Vec<usize>,
    pub samples_used: usize,
}

impl CellStats {
    pub fn empty_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == 0)
            .map(|(i, _)| i)
    }
}

fn check_generators(means: &Points, domain: &Domain) -> Result<()> {
    if means.is_empty() {
        return Err(Error::Geometry("no generators".into()));
    }
    if means.dim() != domain.dim() {
        return Err(Error::Geometry(format!(
            "generators have dimension {} but the domain has dimension {}",
            means.dim(),
            domain.dim()
        )));
    }
    if let Some((i, j)) = means.duplicate_pair() {
        return Err(Error::Geometry(format!("generators {i} and {j} coincide")));
    }
    Ok(())
}

pub fn cell_stats<R: Rng + ?Sized>(
    means: &Points,
    domain: &Domain,
    n_samples: usize,
    rng: &mut R,
) -> Result<CellStats> {
    check_generators(means, domain)?;
    if n_samples == 0 {
        return Err(Error::Parameter(
            "cell statistics need at least one sample".into(),
        ));
    }
    let (k, dim) = (means.len(), means.dim());
    let mut counts = vec![0usize; k];
    let mut sums = vec![0.0; k * dim];
    let mut z = vec![0.0; dim];
    for _ in 0..n_samples {
        domain.sample_uniform_into(rng, &mut z);
        let i = nearest(&z, means);
        counts[i] += 1;
        for (s, x) in sums[i * dim..(i + 1) * dim].iter_mut().zip(&z) {
            *s += x;
        }
    }
    let volume = domain.volume();
    let volumes = counts
        .iter()
        .map(|&c| volume * c as f64 / n_samples as f64)
        .collect();
    let centroids = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            (c > 0).then(|| {
                sums[i * dim..(i + 1) * dim]
                    .iter()
                    .map(|s| s / c as f64)
                    .collect()
            })
        })
        .collect();
    Ok(CellStats {
        volumes,
        centroids,
        counts,
        samples_used: n_samples,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentroidalDeviation {
    /// `max_i |x_i - centroid(S_i)|`, with `diam(E)` standing in for cells
    /// that received no samples.
    pub value: f64,
    /// Cells with no samples; non-empty means a possible collapse.
    pub empty_cells: Vec<usize>,
}

pub fn centroidal_deviation<R: Rng + ?Sized>(
    means: &Points,
    domain: &Domain,
    n_samples: usize,
    rng: &mut R,
) -> Result<CentroidalDeviation> {
    let stats = cell_stats(means, domain, n_samples, rng)?;
    let diameter = domain.diameter();
    let value = stats
        .centroids
        .iter()
        .zip(means.iter())
        .map(|(c, m)| match c {
            Some(c) => crate::model::squared_distance(c, m).sqrt(),
            None => diameter,
        })
        .fold(0.0, f64::max);
    Ok(CentroidalDeviation {
        value,
        empty_cells: stats.empty_cells().collect(),
    })
}

pub fn min_cell_volume<R: Rng + ?Sized>(
    means: &Points,
    domain: &Domain,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let stats = cell_stats(means, domain, n_samples, rng)?;
    Ok(stats.volumes.into_iter().fold(f64::INFINITY, f64::min))
}

/// Perceptual boundary `(x₁ + x₂)/2` of a one-dimensional two-category state.
pub fn boundary_1d(state: &SystemState) -> Result<f64> {
    if state.dim() != 1 || state.k() != 2 {
        return Err(Error::Contract(format!(
            "boundary needs a 1-D state with 2 categories, got dimension {} with {}",
            state.dim(),
            state.k()
        )));
    }
    let (x1, x2) = (state.means().get(0)[0], state.means().get(1)[0]);
    if !(x1 < x2) {
        return Err(Error::Contract(format!("means out of order: {x1} >= {x2}")));
    }
    Ok(0.5 * (x1 + x2))
}
