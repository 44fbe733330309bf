//! Finite-run checks of the long-run behaviour of the model: categories keep
//! receiving exemplars, cells keep positive volume, means keep moving when
//! weights decay, and without decay the tessellation becomes centroidal.
//!
//! The underlying statements are asymptotic, so every check needs a finite
//! horizon, a window or a floor. Those are carried in the option structs and
//! echoed in the report.

use std::fmt;

use rand::Rng;

use crate::ar1::Ar1Process;
use crate::error::{Error, Result};
use crate::geometry::{self, centroidal_deviation, min_cell_volume};
use crate::model::{Dynamics, ExemplarDynamics, ModelConfig, Simulation, SystemState};
use crate::rng::{replica_stream, stream, StreamKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropertyKind {
    NonExtinction,
    NonCollapse,
    NonConvergence,
    MacqueenCvt,
}

impl PropertyKind {
    pub fn name(self) -> &'static str {
        match self {
            PropertyKind::NonExtinction => "non-extinction",
            PropertyKind::NonCollapse => "non-collapse",
            PropertyKind::NonConvergence => "non-convergence",
            PropertyKind::MacqueenCvt => "macqueen-cvt",
        }
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub property: PropertyKind,
    pub passed: bool,
    pub statistics: Vec<(String, f64)>,
    pub thresholds: Vec<(String, f64)>,
    pub seed: u64,
}

impl PropertyReport {
    pub fn statistic(&self, name: &str) -> Option<f64> {
        self.statistics
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }

    pub fn threshold(&self, name: &str) -> Option<f64> {
        self.thresholds
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }
}

fn default_burn_in(lambda: f64) -> u64 {
    if lambda > 0.0 {
        10 * (1.0 / lambda).ceil() as u64
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonExtinctionOptions {
    pub window: u64,
    /// Defaults to `10·⌈1/λ⌉`.
    pub burn_in: Option<u64>,
}

impl Default for NonExtinctionOptions {
    fn default() -> Self {
        Self {
            window: 10_000,
            burn_in: None,
        }
    }
}

/// Passes iff after burn-in every category is assigned at least one exemplar
/// in every run of `window` consecutive steps.
pub fn property_non_extinction(
    config: &ModelConfig,
    n_steps: u64,
    options: NonExtinctionOptions,
) -> Result<PropertyReport> {
    config.validate()?;
    let dynamics = ExemplarDynamics {
        decay: config.decay(),
    };
    property_non_extinction_with(config, config.initial_state(), dynamics, n_steps, options)
}

pub fn property_non_extinction_with<D: Dynamics>(
    config: &ModelConfig,
    state: SystemState,
    dynamics: D,
    n_steps: u64,
    options: NonExtinctionOptions,
) -> Result<PropertyReport> {
    if options.window == 0 {
        return Err(Error::Parameter("window must be >= 1".into()));
    }
    let burn_in = options
        .burn_in
        .unwrap_or_else(|| default_burn_in(config.lambda));
    let k = state.k();
    let mut sim =
        Simulation::with_dynamics(config, state, dynamics, replica_stream(config.seed, 0));
    sim.run(burn_in.min(n_steps))?;

    // `last[i]` is the step index of the latest assignment to i, with the
    // last burn-in step standing in before the first one.
    let mut last = vec![burn_in as i64 - 1; k];
    let mut max_gap = vec![0u64; k];
    let mut counts = vec![0u64; k];
    for n in burn_in..n_steps {
        let i = sim.next()?;
        counts[i] += 1;
        max_gap[i] = max_gap[i].max((n as i64 - last[i] - 1) as u64);
        last[i] = n as i64;
    }
    for i in 0..k {
        max_gap[i] = max_gap[i].max((n_steps as i64 - last[i] - 1).max(0) as u64);
    }
    let longest = max_gap.iter().copied().max().unwrap_or(0);
    let fewest = counts.iter().copied().min().unwrap_or(0);
    Ok(PropertyReport {
        property: PropertyKind::NonExtinction,
        passed: longest < options.window,
        statistics: vec![
            ("longest_gap".into(), longest as f64),
            ("fewest_assignments".into(), fewest as f64),
            (
                "observed_steps".into(),
                n_steps.saturating_sub(burn_in) as f64,
            ),
        ],
        thresholds: vec![
            ("window".into(), options.window as f64),
            ("burn_in".into(), burn_in as f64),
        ],
        seed: config.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonCollapseOptions {
    pub check_stride: u64,
    pub n_samples: usize,
    /// `v₀ = volume_factor · |E| / k`.
    pub volume_factor: f64,
    /// `q₀`: required fraction of checks with every cell above `v₀`.
    pub pass_fraction: f64,
}

impl Default for NonCollapseOptions {
    fn default() -> Self {
        Self {
            check_stride: 10_000,
            n_samples: geometry::DEFAULT_SAMPLES,
            volume_factor: 0.05,
            pass_fraction: 0.5,
        }
    }
}

/// Passes iff, at the checked steps `stride, 2·stride, …`, the fraction with
/// smallest estimated cell volume above `v₀` exceeds `q₀`.
pub fn property_non_collapse(
    config: &ModelConfig,
    n_steps: u64,
    options: NonCollapseOptions,
) -> Result<PropertyReport> {
    if options.check_stride == 0 {
        return Err(Error::Parameter("check stride must be >= 1".into()));
    }
    let mut sim = Simulation::new(config, replica_stream(config.seed, 0))?;
    let v0 = options.volume_factor * config.domain.volume() / config.k as f64;
    let mut min_distance = sim.state().means().min_pairwise_distance();
    let mut min_volume = f64::INFINITY;
    let (mut checks, mut above) = (0u64, 0u64);
    for n in 1..=n_steps {
        sim.next()?;
        if config.k > 1 {
            min_distance = min_distance.min(sim.state().means().min_pairwise_distance());
        }
        if n % options.check_stride == 0 {
            let mut rng = stream(config.seed, StreamKind::Geometry, checks);
            let v = min_cell_volume(
                sim.state().means(),
                &config.domain,
                options.n_samples,
                &mut rng,
            )?;
            min_volume = min_volume.min(v);
            checks += 1;
            above += u64::from(v > v0);
        }
    }
    let fraction = if checks == 0 {
        0.0
    } else {
        above as f64 / checks as f64
    };
    Ok(PropertyReport {
        property: PropertyKind::NonCollapse,
        passed: checks > 0 && fraction > options.pass_fraction,
        statistics: vec![
            ("fraction_above_v0".into(), fraction),
            ("min_cell_volume".into(), min_volume),
            ("min_pairwise_distance".into(), min_distance),
            ("checks".into(), checks as f64),
        ],
        thresholds: vec![
            ("v0".into(), v0),
            ("q0".into(), options.pass_fraction),
            ("check_stride".into(), options.check_stride as f64),
            ("n_samples".into(), options.n_samples as f64),
        ],
        seed: config.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonConvergenceOptions {
    /// Trailing fraction of the run examined.
    pub late_fraction: f64,
    /// Floor on the late-window variance of every mean coordinate. `None`
    /// selects `0.1·σ²/(1-K²)` for the two-category unit-interval model with
    /// `λ > 0` and 0 otherwise.
    pub variance_floor: Option<f64>,
    /// `ε₀`: a step counts as a jump when a mean moves farther than this.
    pub jump: f64,
}

impl Default for NonConvergenceOptions {
    fn default() -> Self {
        Self {
            late_fraction: 0.25,
            variance_floor: None,
            jump: 1e-4,
        }
    }
}

fn default_variance_floor(config: &ModelConfig) -> f64 {
    if config.is_two_category_unit() && config.lambda > 0.0 {
        0.1 * Ar1Process::for_boundary(config.lambda)
            .expect("λ > 0")
            .variance(crate::ar1::Horizon::Infinite)
    } else {
        0.0
    }
}

/// Welford accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

/// Passes iff in the late window every mean coordinate has variance above
/// the floor and every mean jumps by more than `ε₀` at least once.
pub fn property_non_convergence(
    config: &ModelConfig,
    n_steps: u64,
    options: NonConvergenceOptions,
) -> Result<PropertyReport> {
    config.validate()?;
    let dynamics = ExemplarDynamics {
        decay: config.decay(),
    };
    property_non_convergence_with(config, config.initial_state(), dynamics, n_steps, options)
}

pub fn property_non_convergence_with<D: Dynamics>(
    config: &ModelConfig,
    state: SystemState,
    dynamics: D,
    n_steps: u64,
    options: NonConvergenceOptions,
) -> Result<PropertyReport> {
    if !(options.late_fraction > 0.0 && options.late_fraction <= 1.0) {
        return Err(Error::Parameter(format!(
            "late fraction must be in (0, 1], got {}",
            options.late_fraction
        )));
    }
    let floor = options
        .variance_floor
        .unwrap_or_else(|| default_variance_floor(config));
    let (k, dim) = (state.k(), state.dim());
    let late = ((n_steps as f64 * options.late_fraction).ceil() as u64).min(n_steps);
    let start = n_steps - late;

    let mut sim =
        Simulation::with_dynamics(config, state, dynamics, replica_stream(config.seed, 0));
    sim.run(start)?;
    let mut coords = vec![Moments::default(); k * dim];
    let mut boundary = Moments::default();
    let mut jumps = vec![0u64; k];
    let mut previous = sim.state().means().clone();
    for _ in start..n_steps {
        let i = sim.next()?;
        let means = sim.state().means();
        let moved = crate::model::squared_distance(means.get(i), previous.get(i)).sqrt();
        if moved > options.jump {
            jumps[i] += 1;
        }
        previous.get_mut(i).copy_from_slice(means.get(i));
        for (acc, x) in coords.iter_mut().zip(means.as_flat()) {
            acc.push(*x);
        }
        if dim == 1 && k == 2 {
            boundary.push(0.5 * (means.get(0)[0] + means.get(1)[0]));
        }
    }
    let min_var = coords
        .iter()
        .map(Moments::variance)
        .fold(f64::INFINITY, f64::min);
    let min_jump_freq = jumps
        .iter()
        .map(|&j| j as f64 / late.max(1) as f64)
        .fold(f64::INFINITY, f64::min);
    let passed = late > 1 && min_var > floor && min_jump_freq > 0.0;

    let mut statistics = vec![
        ("min_coordinate_variance".into(), min_var),
        ("min_jump_frequency".into(), min_jump_freq),
        ("late_steps".into(), late as f64),
    ];
    if dim == 1 && k == 2 {
        statistics.push(("boundary_variance".into(), boundary.variance()));
    }
    Ok(PropertyReport {
        property: PropertyKind::NonConvergence,
        passed,
        statistics,
        thresholds: vec![
            ("variance_floor".into(), floor),
            ("jump".into(), options.jump),
            ("late_fraction".into(), options.late_fraction),
        ],
        seed: config.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacqueenOptions {
    pub n_samples: usize,
    /// Final deviation must be below `ratio` times the deviation at a tenth
    /// of the run.
    pub ratio: f64,
    /// Final deviation must be below `diameter_fraction · diam(E)`.
    pub diameter_fraction: f64,
}

impl Default for MacqueenOptions {
    fn default() -> Self {
        Self {
            n_samples: geometry::DEFAULT_SAMPLES,
            ratio: 0.25,
            diameter_fraction: 0.05,
        }
    }
}

fn deviation<R: Rng>(
    sim: &Simulation<R>,
    config: &ModelConfig,
    n_samples: usize,
    index: u64,
) -> Result<(f64, bool)> {
    let mut rng = stream(config.seed, StreamKind::Geometry, index);
    let d = centroidal_deviation(sim.state().means(), &config.domain, n_samples, &mut rng)?;
    Ok((d.value, !d.empty_cells.is_empty()))
}

/// Without decay the means approach a centroidal Voronoi tessellation.
pub fn property_macqueen_cvt(
    config: &ModelConfig,
    n_steps: u64,
    options: MacqueenOptions,
) -> Result<PropertyReport> {
    if config.lambda != 0.0 {
        return Err(Error::Parameter(format!(
            "MacQueen check needs λ = 0, got {}",
            config.lambda
        )));
    }
    let mut sim = Simulation::new(config, replica_stream(config.seed, 0))?;
    let early_steps = n_steps / 10;
    sim.run(early_steps)?;
    let (early, early_empty) = deviation(&sim, config, options.n_samples, 0)?;
    sim.run(n_steps - early_steps)?;
    let (last, last_empty) = deviation(&sim, config, options.n_samples, 1)?;
    let limit = options.diameter_fraction * config.domain.diameter();
    let passed = !early_empty && !last_empty && last < options.ratio * early && last < limit;
    Ok(PropertyReport {
        property: PropertyKind::MacqueenCvt,
        passed,
        statistics: vec![
            ("deviation_early".into(), early),
            ("deviation_final".into(), last),
            ("early_step".into(), early_steps as f64),
            ("final_step".into(), n_steps as f64),
        ],
        thresholds: vec![
            ("ratio".into(), options.ratio),
            ("deviation_limit".into(), limit),
            ("n_samples".into(), options.n_samples as f64),
        ],
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{limit_weight, Decay};

    fn preset(lambda: f64, seed: u64) -> ModelConfig {
        let w = if lambda > 0.0 {
            limit_weight(lambda).unwrap() / 2.0
        } else {
            10.0
        };
        ModelConfig::two_category_unit(lambda, [0.25, 0.75], [w, w], seed).unwrap()
    }

    /// Sends every exemplar to category 0 regardless of distance.
    struct Starve(Decay);

    impl Dynamics for Starve {
        fn advance(&mut self, state: &mut SystemState, z: &[f64]) -> usize {
            let f = self.0.factor();
            let w0 = state.weights()[0] * f;
            let w1 = state.weights()[1] * f;
            let x0 = (state.means().get(0)[0] * w0 + z[0]) / (w0 + 1.0);
            let x1 = state.means().get(1)[0];
            state.set_category(0, &[x0], w0 + 1.0);
            state.set_category(1, &[x1], w1.max(f64::MIN_POSITIVE));
            0
        }
    }

    #[test]
    fn non_extinction_passes_for_decaying_model() {
        let r = property_non_extinction(&preset(0.05, 1), 200_000, NonExtinctionOptions::default())
            .unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.threshold("burn_in"), Some(200.0));
    }

    #[test]
    fn single_category_trivially_survives() {
        let config = ModelConfig {
            k: 1,
            init_means: crate::model::Points::line(&[0.4]),
            init_weights: vec![1.0],
            ..preset(0.05, 2)
        };
        let r = property_non_extinction(&config, 20_000, NonExtinctionOptions::default()).unwrap();
        assert!(r.passed);
        assert_eq!(r.statistic("longest_gap"), Some(0.0));
    }

    #[test]
    fn non_extinction_detects_a_starved_category() {
        let config = preset(0.05, 3);
        let dynamics = Starve(config.decay());
        let r = property_non_extinction_with(
            &config,
            config.initial_state(),
            dynamics,
            50_000,
            NonExtinctionOptions::default(),
        )
        .unwrap();
        assert!(!r.passed);
        assert!(r.statistic("longest_gap").unwrap() >= 10_000.0);
    }

    #[test]
    fn non_collapse_passes_with_and_without_decay() {
        let options = NonCollapseOptions {
            n_samples: 20_000,
            ..Default::default()
        };
        for lambda in [0.05, 0.0] {
            let r = property_non_collapse(&preset(lambda, 4), 200_000, options).unwrap();
            assert!(r.passed, "λ = {lambda}: {r:?}");
            assert!(r.statistic("min_pairwise_distance").unwrap() > 1e-3);
        }
    }

    #[test]
    fn non_convergence_separates_decay_from_macqueen() {
        let opts = NonConvergenceOptions::default();
        let decaying = property_non_convergence(&preset(0.01, 5), 400_000, opts).unwrap();
        assert!(decaying.passed, "{decaying:?}");
        let frozen = property_non_convergence(&preset(0.0, 5), 400_000, opts).unwrap();
        assert!(!frozen.passed, "{frozen:?}");
        assert_eq!(frozen.statistic("min_jump_frequency"), Some(0.0));
    }

    #[test]
    fn faster_decay_means_larger_boundary_fluctuations() {
        let opts = NonConvergenceOptions::default();
        let slow = property_non_convergence(&preset(0.01, 6), 400_000, opts).unwrap();
        let fast = property_non_convergence(&preset(0.1, 6), 400_000, opts).unwrap();
        let (vs, vf) = (
            slow.statistic("boundary_variance").unwrap(),
            fast.statistic("boundary_variance").unwrap(),
        );
        assert!(vf > vs, "{vf} <= {vs}");
        let ps = Ar1Process::for_boundary(0.01)
            .unwrap()
            .variance(crate::ar1::Horizon::Infinite);
        let pf = Ar1Process::for_boundary(0.1)
            .unwrap()
            .variance(crate::ar1::Horizon::Infinite);
        assert!(pf > ps);
    }

    #[test]
    fn macqueen_from_generic_start() {
        let config = ModelConfig::two_category_unit(0.0, [0.05, 0.15], [1.0, 1.0], 7).unwrap();
        let r = property_macqueen_cvt(&config, 200_000, MacqueenOptions::default()).unwrap();
        assert!(r.statistic("deviation_final").unwrap() < 0.05);
        assert!(property_macqueen_cvt(&preset(0.1, 7), 10, MacqueenOptions::default()).is_err());
    }

    #[test]
    fn macqueen_at_the_cvt_stays_there() {
        let r =
            property_macqueen_cvt(&preset(0.0, 8), 100_000, MacqueenOptions::default()).unwrap();
        assert!(r.statistic("deviation_final").unwrap() < 0.01);
        assert!(r.statistic("deviation_early").unwrap() < 0.01);
    }

    #[test]
    fn reports_are_reproducible() {
        let a =
            property_non_convergence(&preset(0.05, 9), 50_000, NonConvergenceOptions::default())
                .unwrap();
        let b =
            property_non_convergence(&preset(0.05, 9), 50_000, NonConvergenceOptions::default())
                .unwrap();
        assert_eq!(a, b);
    }
}
