//! The exemplar dynamics proper.
//!
//! Each category is summarised by its weighted mean `x_i` and total weight
//! `w_i`. At every step all weights decay by `e^{-λ}`; the incoming exemplar
//! `z` is assigned to the nearest mean (lowest index on exact ties) and folded
//! into that category's running weighted mean with weight 1:
//!
//! ```text
//! x_i <- (x_i * w_i * e^{-λ} + z) / (w_i * e^{-λ} + 1)
//! w_i <- w_i * e^{-λ} + 1
//! w_j <- w_j * e^{-λ}            (j != i)
//! ```
//!
//! With `λ = 0` this is MacQueen's sequential k-means.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Axis-aligned closed box `[lower, upper]` in `R^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::Parameter("domain must have dimension >= 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::Parameter(format!(
                "domain bounds have mismatched dimensions {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (d, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Parameter(format!(
                    "domain coordinate {d} has empty interior: [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn unit_interval() -> Self {
        Self::cube(1, 0.0, 1.0)
    }

    /// `[lo, hi]^dim`. Panics if `lo >= hi` or `dim == 0`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self::new(vec![lo; dim], vec![hi; dim]).expect("invalid cube bounds")
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }

    /// Length of the main diagonal.
    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    pub fn check(&self, p: &[f64]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "point {p:?} is not in the box {:?}..{:?}",
                self.lower, self.upper
            )))
        }
    }

    pub fn clamp(&self, p: &mut [f64]) {
        for (x, (lo, hi)) in p.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *x = x.clamp(*lo, *hi);
        }
    }

    /// Uniform draw by per-coordinate inverse transform.
    pub fn sample_uniform_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for (x, (lo, hi)) in out.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            let u: f64 = rng.random();
            // lo + u*(hi-lo) can round up past hi when the box is far from
            // the origin; the clamp keeps samples in the closed box.
            *x = (lo + u * (hi - lo)).min(*hi);
        }
    }
}

/// `len` points of dimension `dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    dim: usize,
    coords: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::Parameter(format!(
                "{} coordinates cannot be split into points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows<P: AsRef<[f64]>>(rows: &[P]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != dim) {
            return Err(Error::Parameter("points have differing dimensions".into()));
        }
        Self::new(
            dim,
            rows.iter()
                .flat_map(|r| r.as_ref().iter().copied())
                .collect(),
        )
    }

    /// Scalar points on the line.
    pub fn line(values: &[f64]) -> Self {
        Self {
            dim: 1,
            coords: values.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// First pair `(i, j)` with bit-identical coordinates, if any.
    pub fn duplicate_pair(&self) -> Option<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i) == self.get(j))
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let n = self.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                best = best.min(squared_distance(self.get(i), self.get(j)));
            }
        }
        best.sqrt()
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest mean, lowest index winning exact ties of squared
/// distance. No domain check; shared by [`classify`], the state update and
/// the Voronoi statistics so all three agree bit for bit.
#[inline]
pub(crate) fn nearest(z: &[f64], means: &Points) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, m) in means.iter().enumerate() {
        let d = squared_distance(z, m);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Category (0-based) whose mean is closest to `z`; ties go to the lower index.
pub fn classify(domain: &Domain, z: &[f64], means: &Points) -> Result<usize> {
    domain.check(z)?;
    if means.is_empty() {
        return Err(Error::Parameter("no category means".into()));
    }
    if means.dim() != z.len() {
        return Err(Error::Parameter(format!(
            "point has dimension {} but means have dimension {}",
            z.len(),
            means.dim()
        )));
    }
    Ok(nearest(z, means))
}

/// Exemplar-weight decay rate `λ` together with its factor `e^{-λ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    lambda: f64,
    factor: f64,
}

impl Decay {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Parameter(format!(
                "decay rate must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(Self {
            lambda,
            factor: (-lambda).exp(),
        })
    }

    pub fn lambda(self) -> f64 {
        self.lambda
    }

    /// `e^{-λ}`.
    pub fn factor(self) -> f64 {
        self.factor
    }
}

/// Limiting total weight `W = 1/(1 - e^{-λ})`.
pub fn limit_weight(lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Parameter(format!(
            "limit weight needs a decay rate > 0, got {lambda}"
        )));
    }
    Ok(1.0 / -(-lambda).exp_m1())
}

/// Upper bound `γ = max(Σ w⁰, W)` on the total weight along any trajectory.
pub fn weight_bound(initial_weights: &[f64], lambda: f64) -> Result<f64> {
    let w = limit_weight(lambda)?;
    Ok(initial_weights.iter().sum::<f64>().max(w))
}

/// Total weight after `n` steps from `initial_total`:
/// `W + e^{-λn}(W⁰ - W)`, or `W⁰ + n` without decay.
pub fn total_weight_after(initial_total: f64, decay: Decay, n: u64) -> f64 {
    if decay.lambda() == 0.0 {
        initial_total + n as f64
    } else {
        let w = 1.0 / -(-decay.lambda()).exp_m1();
        w + (-decay.lambda() * n as f64).exp() * (initial_total - w)
    }
}

/// Strictly positive, not necessarily normalised, density on the domain,
/// sampled by rejection against the constant `envelope >= sup f`.
#[derive(Clone)]
pub struct Density {
    label: String,
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    envelope: f64,
    max_attempts: u64,
}

impl Density {
    pub const DEFAULT_MAX_ATTEMPTS: u64 = 1_000_000;

    pub fn new<F>(label: impl Into<String>, envelope: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if !(envelope.is_finite() && envelope > 0.0) {
            return Err(Error::Parameter(format!(
                "envelope must be finite and > 0, got {envelope}"
            )));
        }
        Ok(Self {
            label: label.into(),
            f: Arc::new(f),
            envelope,
            max_attempts: Self::DEFAULT_MAX_ATTEMPTS,
        })
    }

    pub fn with_max_attempts(mut self, attempts: u64) -> Self {
        self.max_attempts = attempts.max(1);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density")
            .field("label", &self.label)
            .field("envelope", &self.envelope)
            .field("max_attempts", &self.max_attempts)
            .finish_non_exhaustive()
    }
}

/// Law of the incoming exemplars.
#[derive(Debug, Clone, Default)]
pub enum DistributionSpec {
    #[default]
    Uniform,
    Density(Density),
}

impl DistributionSpec {
    pub fn is_uniform(&self) -> bool {
        matches!(self, DistributionSpec::Uniform)
    }

    pub fn sample_into<R: Rng + ?Sized>(
        &self,
        domain: &Domain,
        rng: &mut R,
        out: &mut [f64],
    ) -> Result<()> {
        match self {
            DistributionSpec::Uniform => {
                domain.sample_uniform_into(rng, out);
                Ok(())
            }
            DistributionSpec::Density(density) => {
                for _ in 0..density.max_attempts {
                    domain.sample_uniform_into(rng, out);
                    let value = density.eval(out);
                    if !(value > 0.0) {
                        return Err(Error::Density {
                            point: out.to_vec(),
                            value,
                        });
                    }
                    if value > density.envelope {
                        return Err(Error::Parameter(format!(
                            "density {} evaluates to {value} at {out:?}, above its envelope {}",
                            density.label, density.envelope
                        )));
                    }
                    let u: f64 = rng.random();
                    if u * density.envelope < value {
                        return Ok(());
                    }
                }
                Err(Error::Sampling {
                    attempts: density.max_attempts,
                    envelope: density.envelope,
                })
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, domain: &Domain, rng: &mut R) -> Result<Vec<f64>> {
        let mut out = vec![0.0; domain.dim()];
        self.sample_into(domain, rng, &mut out)?;
        Ok(out)
    }
}

/// Everything needed to start a run.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub k: usize,
    pub lambda: f64,
    pub domain: Domain,
    pub dist: DistributionSpec,
    pub init_means: Points,
    pub init_weights: Vec<f64>,
    pub seed: u64,
}

impl ModelConfig {
    /// Two categories on `[0, 1]` with uniform arrivals.
    pub fn two_category_unit(
        lambda: f64,
        means: [f64; 2],
        weights: [f64; 2],
        seed: u64,
    ) -> Result<Self> {
        let config = Self {
            k: 2,
            lambda,
            domain: Domain::unit_interval(),
            dist: DistributionSpec::Uniform,
            init_means: Points::line(&means),
            init_weights: weights.to_vec(),
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        Decay::new(self.lambda)?;
        if self.k == 0 {
            return Err(Error::Parameter("k must be >= 1".into()));
        }
        if self.init_means.len() != self.k {
            return Err(Error::Parameter(format!(
                "init_means has {} points but k = {}",
                self.init_means.len(),
                self.k
            )));
        }
        if self.init_weights.len() != self.k {
            return Err(Error::Parameter(format!(
                "init_weights has {} entries but k = {}",
                self.init_weights.len(),
                self.k
            )));
        }
        if self.init_means.dim() != self.domain.dim() {
            return Err(Error::Parameter(format!(
                "init_means have dimension {} but the domain has dimension {}",
                self.init_means.dim(),
                self.domain.dim()
            )));
        }
        if let Some((i, j)) = self.init_means.duplicate_pair() {
            return Err(Error::Parameter(format!("init_means {i} and {j} coincide")));
        }
        for (i, m) in self.init_means.iter().enumerate() {
            if !self.domain.contains(m) {
                return Err(Error::Domain(format!(
                    "init_means {i} = {m:?} lies outside the domain"
                )));
            }
        }
        if let Some((i, w)) = self
            .init_weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::Parameter(format!(
                "init_weights {i} = {w} is not > 0"
            )));
        }
        Ok(())
    }

    pub fn decay(&self) -> Decay {
        Decay::new(self.lambda).expect("validated decay rate")
    }

    pub fn initial_state(&self) -> SystemState {
        SystemState {
            means: self.init_means.clone(),
            weights: self.init_weights.clone(),
            step: 0,
        }
    }

    /// True for the one-dimensional, two-category, uniform, `[0, 1]` setting
    /// where the boundary reduction applies.
    pub fn is_two_category_unit(&self) -> bool {
        self.k == 2 && self.domain == Domain::unit_interval() && self.dist.is_uniform()
    }
}

/// Category means, category weights and the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    means: Points,
    weights: Vec<f64>,
    step: u64,
}

impl SystemState {
    pub fn new(means: Points, weights: Vec<f64>) -> Result<Self> {
        if means.len() != weights.len() || means.is_empty() {
            return Err(Error::Parameter(format!(
                "{} means but {} weights",
                means.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Parameter(format!("weight {w} is not > 0")));
        }
        Ok(Self {
            means,
            weights,
            step: 0,
        })
    }

    pub fn means(&self) -> &Points {
        &self.means
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means.dim()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Fold `z` into the state in place and return the category it joined.
    /// `z` must lie in the domain; callers drawing from the configured
    /// distribution satisfy this by construction.
    #[inline]
    pub fn advance(&mut self, z: &[f64], decay: Decay) -> usize {
        debug_assert_eq!(z.len(), self.dim());
        let winner = nearest(z, &self.means);
        let factor = decay.factor();
        for w in &mut self.weights {
            *w *= factor;
        }
        let decayed = self.weights[winner];
        let denom = decayed + 1.0;
        for (x, zc) in self.means.get_mut(winner).iter_mut().zip(z) {
            *x = (*x * decayed + zc) / denom;
        }
        self.weights[winner] = denom;
        self.step += 1;
        winner
    }

    /// Checked in-place update.
    pub fn apply(&mut self, domain: &Domain, z: &[f64], decay: Decay) -> Result<usize> {
        domain.check(z)?;
        Ok(self.advance(z, decay))
    }

    /// The successor state after exemplar `z`.
    pub fn step(&self, domain: &Domain, z: &[f64], lambda: f64) -> Result<SystemState> {
        let decay = Decay::new(lambda)?;
        let mut next = self.clone();
        next.apply(domain, z, decay)?;
        Ok(next)
    }

    /// Overwrite one category. Used to construct doctored states in tests and
    /// negative controls.
    pub fn set_category(&mut self, i: usize, mean: &[f64], weight: f64) {
        self.means.get_mut(i).copy_from_slice(mean);
        self.weights[i] = weight;
    }
}

/// How a state reacts to one exemplar. [`ExemplarDynamics`] is the model;
/// the trait exists so the property checks can be pointed at deliberately
/// broken dynamics to confirm they detect failure.
pub trait Dynamics {
    fn advance(&mut self, state: &mut SystemState, z: &[f64]) -> usize;
}

#[derive(Debug, Clone, Copy)]
pub struct ExemplarDynamics {
    pub decay: Decay,
}

impl Dynamics for ExemplarDynamics {
    #[inline]
    fn advance(&mut self, state: &mut SystemState, z: &[f64]) -> usize {
        state.advance(z, self.decay)
    }
}

/// A state evolving under a seeded exemplar stream.
pub struct Simulation<R, D = ExemplarDynamics> {
    domain: Domain,
    dist: DistributionSpec,
    dynamics: D,
    state: SystemState,
    rng: R,
    z: Vec<f64>,
}

impl<R: Rng> Simulation<R, ExemplarDynamics> {
    pub fn new(config: &ModelConfig, rng: R) -> Result<Self> {
        config.validate()?;
        let dynamics = ExemplarDynamics {
            decay: config.decay(),
        };
        Ok(Self::with_dynamics(
            config,
            config.initial_state(),
            dynamics,
            rng,
        ))
    }
}

impl<R: Rng, D: Dynamics> Simulation<R, D> {
    pub fn with_dynamics(config: &ModelConfig, state: SystemState, dynamics: D, rng: R) -> Self {
        Self {
            domain: config.domain.clone(),
            dist: config.dist.clone(),
            dynamics,
            state,
            rng,
            z: vec![0.0; config.domain.dim()],
        }
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn into_state(self) -> SystemState {
        self.state
    }

    /// Last exemplar drawn.
    pub fn last_exemplar(&self) -> &[f64] {
        &self.z
    }

    /// Draw one exemplar, update, and return the receiving category.
    pub fn next(&mut self) -> Result<usize> {
        self.dist
            .sample_into(&self.domain, &mut self.rng, &mut self.z)?;
        Ok(self.dynamics.advance(&mut self.state, &self.z))
    }

    pub fn run(&mut self, steps: u64) -> Result<()> {
        for _ in 0..steps {
            self.next()?;
        }
        Ok(())
    }
}
