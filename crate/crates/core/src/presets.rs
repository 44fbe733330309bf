//! Canonical configurations for the experiments the command-line tool runs.

use rand_distr::{Distribution, Normal};

use crate::ar1::Horizon;
use crate::error::Result;
use crate::model::{limit_weight, DistributionSpec, Domain, ModelConfig, Points};
use crate::rng::{stream, StreamKind};

/// Two categories on `[0, 1]` started at `(1/4, 3/4)` with weights `W/2`
/// each, i.e. at the fixed point of the mean dynamics.
pub fn two_category_at_fixed_point(lambda: f64, seed: u64) -> Result<ModelConfig> {
    let half = limit_weight(lambda)? / 2.0;
    ModelConfig::two_category_unit(lambda, [0.25, 0.75], [half, half], seed)
}

/// Decaying run with `λ = 0.01`.
pub fn fig3_left(seed: u64) -> Result<ModelConfig> {
    two_category_at_fixed_point(0.01, seed)
}

/// MacQueen run: `λ = 0`, weights 10.
pub fn fig3_right(seed: u64) -> Result<ModelConfig> {
    ModelConfig::two_category_unit(0.0, [0.25, 0.75], [10.0, 10.0], seed)
}

pub const THEOREM_SUITE_LAMBDA: f64 = 0.05;
pub const THEOREM_SUITE_STEPS: u64 = 1_000_000;

pub fn theorem_suite(seed: u64) -> Result<ModelConfig> {
    two_category_at_fixed_point(THEOREM_SUITE_LAMBDA, seed)
}

/// Decay rates swept for the boundary-variance curve, spanning
/// `[0.005, 0.2]`.
pub const VARIANCE_CURVE_LAMBDAS: [f64; 9] = [0.005, 0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.15, 0.2];

pub const VARIANCE_CURVE_HORIZONS: [Horizon; 5] = [
    Horizon::Steps(10),
    Horizon::Steps(100),
    Horizon::Steps(1000),
    Horizon::Steps(10_000),
    Horizon::Infinite,
];

pub const VARIANCE_CURVE_REPLICAS: usize = 10_000;

/// Four categories in a 100 × 100 square, each seeded with a Gaussian cloud
/// of unit-weight exemplars.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPreset {
    pub side: f64,
    pub centers: Vec<[f64; 2]>,
    pub per_category: usize,
    pub spread: f64,
}

impl Default for ScatterPreset {
    fn default() -> Self {
        Self {
            side: 100.0,
            centers: vec![[20.0, 30.0], [35.0, 80.0], [60.0, 45.0], [85.0, 70.0]],
            per_category: 100,
            spread: 3.0,
        }
    }
}

/// Initial exemplars as `(category, location, weight)`.
pub type InitialExemplars = Vec<(usize, Vec<f64>, f64)>;

impl ScatterPreset {
    /// Draw the initial clouds from the `Initialization` stream of `seed` and
    /// derive the category means and weights from them. Draws falling outside
    /// the square are clamped onto it.
    pub fn build(&self, lambda: f64, seed: u64) -> Result<(ModelConfig, InitialExemplars)> {
        let domain = Domain::cube(2, 0.0, self.side);
        let noise =
            Normal::new(0.0, self.spread).map_err(|e| crate::Error::Parameter(e.to_string()))?;
        let mut rng = stream(seed, StreamKind::Initialization, 0);
        let mut exemplars = Vec::with_capacity(self.centers.len() * self.per_category);
        let mut means = Vec::with_capacity(self.centers.len() * 2);
        for (i, c) in self.centers.iter().enumerate() {
            let mut sum = [0.0; 2];
            for _ in 0..self.per_category {
                let mut p = vec![c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)];
                domain.clamp(&mut p);
                sum[0] += p[0];
                sum[1] += p[1];
                exemplars.push((i, p, 1.0));
            }
            let n = self.per_category as f64;
            means.extend([sum[0] / n, sum[1] / n]);
        }
        let k = self.centers.len();
        let config = ModelConfig {
            k,
            lambda,
            domain,
            dist: DistributionSpec::Uniform,
            init_means: Points::new(2, means)?,
            init_weights: vec![self.per_category as f64; k],
            seed,
        };
        config.validate()?;
        Ok((config, exemplars))
    }
}
