//! Run configuration files.
//!
//! A config is a list of `key = value` lines. Blank lines and lines starting
//! with `#` are ignored. `preset = <name>` loads a complete configuration
//! which any other key in the file then overrides. Lists are comma
//! separated; point lists separate points with `;` and coordinates with `,`.
//!
//! [`RunSpec::to_config_text`] writes every key explicitly, and output files
//! carry that text in their header so a run can be reproduced from its
//! output alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use exdyn_core::ar1::Horizon;
use exdyn_core::harness::{
    MacqueenOptions, NonCollapseOptions, NonConvergenceOptions, NonExtinctionOptions, DEFAULT_GRID,
};
use exdyn_core::presets::{self, InitialExemplars, ScatterPreset};
use exdyn_core::{limit_weight, Density, DistributionSpec, Domain, ModelConfig, Points};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("unknown preset `{0}` (expected fig1, fig3-left, fig3-right, fig4 or theorem-suite)")]
    UnknownPreset(String),
}

type Result<T> = std::result::Result<T, ConfigError>;

pub const PRESETS: [&str; 5] = ["fig1", "fig3-left", "fig3-right", "fig4", "theorem-suite"];

/// Arrival law as written in a config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistSpec {
    Uniform,
    /// Density `1 + slope·(u - 1/2)` in the normalised first coordinate `u`,
    /// `|slope| < 2`.
    Linear {
        slope: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Explicit {
        means: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
    /// `count` unit-weight exemplars per category, Gaussian with standard
    /// deviation `sigma` about each center, clamped to the domain.
    Scatter {
        centers: Vec<Vec<f64>>,
        count: usize,
        sigma: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub k: usize,
    pub lambda: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub dist: DistSpec,
    pub init: InitSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub n_steps: u64,
    pub stride: u64,
    pub replicas: usize,
    pub lambda_grid: Vec<f64>,
    pub n_list: Vec<Horizon>,
    pub window: u64,
    /// `None` means `10·⌈1/λ⌉`.
    pub burn_in: Option<u64>,
    pub check_stride: u64,
    pub n_samples: usize,
    pub volume_factor: f64,
    pub pass_fraction: f64,
    pub late_fraction: f64,
    pub jump: f64,
    /// `None` means the model default floor.
    pub variance_floor: Option<f64>,
    pub cvt_ratio: f64,
    pub cvt_diameter_fraction: f64,
    pub prune_threshold: f64,
    pub grid: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let ext = NonExtinctionOptions::default();
        let col = NonCollapseOptions::default();
        let conv = NonConvergenceOptions::default();
        let cvt = MacqueenOptions::default();
        Self {
            n_steps: 10_000,
            stride: 1,
            replicas: presets::VARIANCE_CURVE_REPLICAS,
            lambda_grid: presets::VARIANCE_CURVE_LAMBDAS.to_vec(),
            n_list: presets::VARIANCE_CURVE_HORIZONS.to_vec(),
            window: ext.window,
            burn_in: ext.burn_in,
            check_stride: col.check_stride,
            n_samples: col.n_samples,
            volume_factor: col.volume_factor,
            pass_fraction: col.pass_fraction,
            late_fraction: conv.late_fraction,
            jump: conv.jump,
            variance_floor: conv.variance_floor,
            cvt_ratio: cvt.ratio,
            cvt_diameter_fraction: cvt.diameter_fraction,
            prune_threshold: exdyn_core::ExemplarCloud::DEFAULT_PRUNE_THRESHOLD,
            grid: DEFAULT_GRID,
        }
    }
}

impl ExperimentSpec {
    pub fn non_extinction(&self) -> NonExtinctionOptions {
        NonExtinctionOptions {
            window: self.window,
            burn_in: self.burn_in,
        }
    }

    pub fn non_collapse(&self) -> NonCollapseOptions {
        NonCollapseOptions {
            check_stride: self.check_stride,
            n_samples: self.n_samples,
            volume_factor: self.volume_factor,
            pass_fraction: self.pass_fraction,
        }
    }

    pub fn non_convergence(&self) -> NonConvergenceOptions {
        NonConvergenceOptions {
            late_fraction: self.late_fraction,
            variance_floor: self.variance_floor,
            jump: self.jump,
        }
    }

    pub fn macqueen(&self) -> MacqueenOptions {
        MacqueenOptions {
            n_samples: self.n_samples,
            ratio: self.cvt_ratio,
            diameter_fraction: self.cvt_diameter_fraction,
        }
    }
}

/// A fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub preset: Option<String>,
    pub model: ModelSpec,
    pub experiment: ExperimentSpec,
    pub seed: u64,
    pub output: PathBuf,
}

fn two_category(lambda: f64, weights: [f64; 2]) -> ModelSpec {
    ModelSpec {
        k: 2,
        lambda,
        lower: vec![0.0],
        upper: vec![1.0],
        dist: DistSpec::Uniform,
        init: InitSpec::Explicit {
            means: vec![vec![0.25], vec![0.75]],
            weights: weights.to_vec(),
        },
    }
}

fn half_limit(lambda: f64) -> f64 {
    limit_weight(lambda).expect("preset decay rate") / 2.0
}

fn preset(name: &str) -> Result<RunSpec> {
    let experiment = ExperimentSpec::default();
    let (model, experiment) = match name {
        "fig1" => {
            let fig = ScatterPreset::default();
            let model = ModelSpec {
                k: fig.centers.len(),
                lambda: 0.05,
                lower: vec![0.0; 2],
                upper: vec![fig.side; 2],
                dist: DistSpec::Uniform,
                init: InitSpec::Scatter {
                    centers: fig.centers.iter().map(|c| c.to_vec()).collect(),
                    count: fig.per_category,
                    sigma: fig.spread,
                },
            };
            (
                model,
                ExperimentSpec {
                    n_steps: 10_000,
                    ..experiment
                },
            )
        }
        "fig3-left" => {
            let w = half_limit(0.01);
            (
                two_category(0.01, [w, w]),
                ExperimentSpec {
                    n_steps: 10_000,
                    ..experiment
                },
            )
        }
        "fig3-right" => (
            two_category(0.0, [10.0, 10.0]),
            ExperimentSpec {
                n_steps: 10_000,
                ..experiment
            },
        ),
        "fig4" => {
            let w = half_limit(0.05);
            (two_category(0.05, [w, w]), experiment)
        }
        "theorem-suite" => {
            let w = half_limit(presets::THEOREM_SUITE_LAMBDA);
            (
                two_category(presets::THEOREM_SUITE_LAMBDA, [w, w]),
                ExperimentSpec {
                    n_steps: presets::THEOREM_SUITE_STEPS,
                    ..experiment
                },
            )
        }
        other => return Err(ConfigError::UnknownPreset(other.to_string())),
    };
    Ok(RunSpec {
        preset: Some(name.to_string()),
        model,
        experiment,
        seed: 1,
        output: PathBuf::from("."),
    })
}

const MODEL_KEYS: [&str; 12] = [
    "k",
    "lambda",
    "dim",
    "domain.lower",
    "domain.upper",
    "dist",
    "init.mode",
    "init.means",
    "init.weights",
    "init.centers",
    "init.count",
    "init.sigma",
];

const EXPERIMENT_KEYS: [&str; 18] = [
    "n_steps",
    "stride",
    "replicas",
    "lambda_grid",
    "n_list",
    "window",
    "burn_in",
    "check_stride",
    "n_samples",
    "volume_factor",
    "pass_fraction",
    "late_fraction",
    "jump",
    "variance_floor",
    "cvt_ratio",
    "cvt_diameter_fraction",
    "prune_threshold",
    "grid",
];

fn is_known(key: &str) -> bool {
    key == "preset"
        || key == "seed"
        || key == "output"
        || MODEL_KEYS.contains(&key)
        || EXPERIMENT_KEYS.contains(&key)
}

/// Raw `key = value` pairs with their line numbers.
fn tokenize(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, got `{trimmed}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                message: "empty key".into(),
            });
        }
        if !is_known(key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if map
            .insert(key.to_string(), (line, value.to_string()))
            .is_some()
        {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
    }
    Ok(map)
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| invalid(key, format!("`{value}`: {e}")))
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| scalar(key, v.trim())).collect()
}

fn points(key: &str, value: &str) -> Result<Vec<Vec<f64>>> {
    value.split(';').map(|p| list(key, p.trim())).collect()
}

fn horizons(key: &str, value: &str) -> Result<Vec<Horizon>> {
    value
        .split(',')
        .map(|v| match v.trim() {
            "inf" => Ok(Horizon::Infinite),
            n => scalar(key, n).map(Horizon::Steps),
        })
        .collect()
}

fn dist(key: &str, value: &str) -> Result<DistSpec> {
    match value.split_once(':') {
        None if value == "uniform" => Ok(DistSpec::Uniform),
        Some(("linear", slope)) => {
            let slope: f64 = scalar(key, slope.trim())?;
            if !(slope.abs() < 2.0) {
                return Err(invalid(key, "linear slope must satisfy |slope| < 2"));
            }
            Ok(DistSpec::Linear { slope })
        }
        _ => Err(invalid(
            key,
            format!("`{value}` (expected `uniform` or `linear:<slope>`)"),
        )),
    }
}

fn optional(value: &str) -> Option<String> {
    (value != "auto").then(|| value.to_string())
}

/// Parse a config file. `overrides` are applied after the file, e.g. values
/// from the command line.
pub fn parse_config_with(text: &str, overrides: &[(&str, String)]) -> Result<RunSpec> {
    let mut map = tokenize(text)?;
    for (key, value) in overrides {
        if !is_known(key) {
            return Err(ConfigError::UnknownKey {
                line: 0,
                key: key.to_string(),
            });
        }
        map.insert(key.to_string(), (0, value.clone()));
    }
    let get = |key: &str| map.get(key).map(|(_, v)| v.as_str());

    let base = match get("preset") {
        Some(name) => Some(preset(name)?),
        None => None,
    };

    // model
    let base_model = base.as_ref().map(|b| &b.model);
    let k: usize = match get("k") {
        Some(v) => scalar("k", v)?,
        None => base_model
            .map(|m| m.k)
            .ok_or_else(|| ConfigError::Missing("k".into()))?,
    };
    let lambda: f64 = match get("lambda") {
        Some(v) => scalar("lambda", v)?,
        None => base_model
            .map(|m| m.lambda)
            .ok_or_else(|| ConfigError::Missing("lambda".into()))?,
    };
    let lower: Vec<f64> = match get("domain.lower") {
        Some(v) => list("domain.lower", v)?,
        None => base_model
            .map(|m| m.lower.clone())
            .ok_or_else(|| ConfigError::Missing("domain.lower".into()))?,
    };
    let upper: Vec<f64> = match get("domain.upper") {
        Some(v) => list("domain.upper", v)?,
        None => base_model
            .map(|m| m.upper.clone())
            .ok_or_else(|| ConfigError::Missing("domain.upper".into()))?,
    };
    if let Some(v) = get("dim") {
        let dim: usize = scalar("dim", v)?;
        if dim != lower.len() || dim != upper.len() {
            return Err(invalid(
                "dim",
                format!("{dim} does not match the domain bounds"),
            ));
        }
    }
    let dist = match get("dist") {
        Some(v) => dist("dist", v)?,
        None => base_model.map_or(DistSpec::Uniform, |m| m.dist),
    };
    let mode =
        get("init.mode")
            .map(str::to_string)
            .unwrap_or_else(|| match base_model.map(|m| &m.init) {
                Some(InitSpec::Scatter { .. }) => "scatter".into(),
                _ => "explicit".into(),
            });
    let init = match mode.as_str() {
        "explicit" => {
            let (bm, bw) = match base_model.map(|m| &m.init) {
                Some(InitSpec::Explicit { means, weights }) => {
                    (Some(means.clone()), Some(weights.clone()))
                }
                _ => (None, None),
            };
            let means = match get("init.means") {
                Some(v) => points("init.means", v)?,
                None => bm.ok_or_else(|| ConfigError::Missing("init.means".into()))?,
            };
            let weights = match get("init.weights") {
                Some(v) => list("init.weights", v)?,
                None => bw.ok_or_else(|| ConfigError::Missing("init.weights".into()))?,
            };
            InitSpec::Explicit { means, weights }
        }
        "scatter" => {
            let (bc, bn, bs) = match base_model.map(|m| &m.init) {
                Some(InitSpec::Scatter {
                    centers,
                    count,
                    sigma,
                }) => (Some(centers.clone()), Some(*count), Some(*sigma)),
                _ => (None, None, None),
            };
            let centers = match get("init.centers") {
                Some(v) => points("init.centers", v)?,
                None => bc.ok_or_else(|| ConfigError::Missing("init.centers".into()))?,
            };
            let count = match get("init.count") {
                Some(v) => scalar("init.count", v)?,
                None => bn.ok_or_else(|| ConfigError::Missing("init.count".into()))?,
            };
            let sigma = match get("init.sigma") {
                Some(v) => scalar("init.sigma", v)?,
                None => bs.ok_or_else(|| ConfigError::Missing("init.sigma".into()))?,
            };
            InitSpec::Scatter {
                centers,
                count,
                sigma,
            }
        }
        other => {
            return Err(invalid(
                "init.mode",
                format!("`{other}` (expected explicit or scatter)"),
            ))
        }
    };
    let model = ModelSpec {
        k,
        lambda,
        lower,
        upper,
        dist,
        init,
    };

    // experiment
    let mut e = base
        .as_ref()
        .map(|b| b.experiment.clone())
        .unwrap_or_default();
    macro_rules! set {
        ($field:ident, $key:literal) => {
            if let Some(v) = get($key) {
                e.$field = scalar($key, v)?;
            }
        };
    }
    set!(n_steps, "n_steps");
    set!(stride, "stride");
    set!(replicas, "replicas");
    set!(window, "window");
    set!(check_stride, "check_stride");
    set!(n_samples, "n_samples");
    set!(volume_factor, "volume_factor");
    set!(pass_fraction, "pass_fraction");
    set!(late_fraction, "late_fraction");
    set!(jump, "jump");
    set!(cvt_ratio, "cvt_ratio");
    set!(cvt_diameter_fraction, "cvt_diameter_fraction");
    set!(prune_threshold, "prune_threshold");
    set!(grid, "grid");
    if let Some(v) = get("lambda_grid") {
        e.lambda_grid = list("lambda_grid", v)?;
    }
    if let Some(v) = get("n_list") {
        e.n_list = horizons("n_list", v)?;
    }
    if let Some(v) = get("burn_in") {
        e.burn_in = optional(v).map(|v| scalar("burn_in", &v)).transpose()?;
    }
    if let Some(v) = get("variance_floor") {
        e.variance_floor = optional(v)
            .map(|v| scalar("variance_floor", &v))
            .transpose()?;
    }

    let seed = match get("seed") {
        Some(v) => scalar("seed", v)?,
        None => base
            .as_ref()
            .map(|b| b.seed)
            .ok_or_else(|| ConfigError::Missing("seed".into()))?,
    };
    let output = match get("output") {
        Some(v) => PathBuf::from(v),
        None => base
            .as_ref()
            .map_or_else(|| PathBuf::from("."), |b| b.output.clone()),
    };

    let spec = RunSpec {
        preset: get("preset").map(str::to_string),
        model,
        experiment: e,
        seed,
        output,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn parse_config(text: &str) -> Result<RunSpec> {
    parse_config_with(text, &[])
}

/// Config key a core validation message refers to.
fn key_for_model_error(message: &str) -> &'static str {
    if message.contains("init_weights") {
        "init.weights"
    } else if message.contains("init_means") {
        "init.means"
    } else if message.starts_with("k must") {
        "k"
    } else if message.contains("decay rate") {
        "lambda"
    } else {
        "domain.lower"
    }
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn join_points(points: &[Vec<f64>]) -> String {
    points
        .iter()
        .map(|p| join(p))
        .collect::<Vec<_>>()
        .join("; ")
}

impl RunSpec {
    fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if e.stride == 0 {
            return Err(invalid("stride", "must be >= 1"));
        }
        if e.window == 0 {
            return Err(invalid("window", "must be >= 1"));
        }
        if e.check_stride == 0 {
            return Err(invalid("check_stride", "must be >= 1"));
        }
        if e.n_samples == 0 {
            return Err(invalid("n_samples", "must be >= 1"));
        }
        if e.grid < 2 {
            return Err(invalid("grid", "must be >= 2"));
        }
        if !(e.prune_threshold >= 0.0) {
            return Err(invalid("prune_threshold", "must be >= 0"));
        }
        if !(e.late_fraction > 0.0 && e.late_fraction <= 1.0) {
            return Err(invalid("late_fraction", "must be in (0, 1]"));
        }
        if e.lambda_grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(invalid("lambda_grid", "every decay rate must be > 0"));
        }
        if let InitSpec::Scatter {
            centers,
            count,
            sigma,
        } = &self.model.init
        {
            if *count == 0 {
                return Err(invalid("init.count", "must be >= 1"));
            }
            if !(*sigma > 0.0) {
                return Err(invalid("init.sigma", "must be > 0"));
            }
            if centers.len() != self.model.k {
                return Err(invalid(
                    "init.centers",
                    format!("{} centers but k = {}", centers.len(), self.model.k),
                ));
            }
        }
        self.model_config().map(|_| ())
    }

    /// Build the core configuration, with the initial exemplar cloud when the
    /// initialisation scatters exemplars.
    pub fn model_config_with_exemplars(&self) -> Result<(ModelConfig, InitialExemplars)> {
        let m = &self.model;
        let domain = Domain::new(m.lower.clone(), m.upper.clone())
            .map_err(|e| invalid("domain.lower", e.to_string()))?;
        let dist = match m.dist {
            DistSpec::Uniform => DistributionSpec::Uniform,
            DistSpec::Linear { slope } => {
                let (lo, width) = (m.lower[0], m.upper[0] - m.lower[0]);
                let density = Density::new(
                    format!("linear:{slope}"),
                    1.0 + slope.abs() / 2.0,
                    move |x| 1.0 + slope * ((x[0] - lo) / width - 0.5),
                )
                .map_err(|e| invalid("dist", e.to_string()))?;
                DistributionSpec::Density(density)
            }
        };
        let (config, exemplars) = match &m.init {
            InitSpec::Explicit { means, weights } => {
                let init_means =
                    Points::from_rows(means).map_err(|e| invalid("init.means", e.to_string()))?;
                let config = ModelConfig {
                    k: m.k,
                    lambda: m.lambda,
                    domain,
                    dist,
                    init_means,
                    init_weights: weights.clone(),
                    seed: self.seed,
                };
                (config, Vec::new())
            }
            InitSpec::Scatter {
                centers,
                count,
                sigma,
            } => {
                if domain.dim() != 2 || centers.iter().any(|c| c.len() != 2) {
                    return Err(invalid(
                        "init.centers",
                        "scatter initialisation is two-dimensional",
                    ));
                }
                if domain.lower().iter().any(|l| *l != 0.0)
                    || domain.upper()[0] != domain.upper()[1]
                {
                    return Err(invalid(
                        "domain.lower",
                        "scatter initialisation needs a square [0, s]^2",
                    ));
                }
                let fig = ScatterPreset {
                    side: domain.upper()[0],
                    centers: centers.iter().map(|c| [c[0], c[1]]).collect(),
                    per_category: *count,
                    spread: *sigma,
                };
                let (mut config, ex) = fig
                    .build(m.lambda, self.seed)
                    .map_err(|e| invalid("init.centers", e.to_string()))?;
                config.dist = dist;
                (config, ex)
            }
        };
        config.validate().map_err(|e| {
            let msg = e.to_string();
            invalid(key_for_model_error(&msg), msg)
        })?;
        Ok((config, exemplars))
    }

    pub fn model_config(&self) -> Result<ModelConfig> {
        self.model_config_with_exemplars().map(|(c, _)| c)
    }

    /// Every key, one per line, in a fixed order. Parses back to `self`.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        if let Some(p) = &self.preset {
            line("preset", p.clone());
        }
        let m = &self.model;
        line("k", m.k.to_string());
        line("lambda", m.lambda.to_string());
        line("dim", m.lower.len().to_string());
        line("domain.lower", join(&m.lower));
        line("domain.upper", join(&m.upper));
        line(
            "dist",
            match m.dist {
                DistSpec::Uniform => "uniform".into(),
                DistSpec::Linear { slope } => format!("linear:{slope}"),
            },
        );
        match &m.init {
            InitSpec::Explicit { means, weights } => {
                line("init.mode", "explicit".into());
                line("init.means", join_points(means));
                line("init.weights", join(weights));
            }
            InitSpec::Scatter {
                centers,
                count,
                sigma,
            } => {
                line("init.mode", "scatter".into());
                line("init.centers", join_points(centers));
                line("init.count", count.to_string());
                line("init.sigma", sigma.to_string());
            }
        }
        let e = &self.experiment;
        line("n_steps", e.n_steps.to_string());
        line("stride", e.stride.to_string());
        line("replicas", e.replicas.to_string());
        line("lambda_grid", join(&e.lambda_grid));
        line(
            "n_list",
            e.n_list
                .iter()
                .map(|h| match h {
                    Horizon::Steps(n) => n.to_string(),
                    Horizon::Infinite => "inf".into(),
                })
                .collect::<Vec<_>>()
                .join(", "),
        );
        line("window", e.window.to_string());
        line(
            "burn_in",
            e.burn_in.map_or("auto".into(), |b| b.to_string()),
        );
        line("check_stride", e.check_stride.to_string());
        line("n_samples", e.n_samples.to_string());
        line("volume_factor", e.volume_factor.to_string());
        line("pass_fraction", e.pass_fraction.to_string());
        line("late_fraction", e.late_fraction.to_string());
        line("jump", e.jump.to_string());
        line(
            "variance_floor",
            e.variance_floor.map_or("auto".into(), |v| v.to_string()),
        );
        line("cvt_ratio", e.cvt_ratio.to_string());
        line("cvt_diameter_fraction", e.cvt_diameter_fraction.to_string());
        line("prune_threshold", e.prune_threshold.to_string());
        line("grid", e.grid.to_string());
        line("seed", self.seed.to_string());
        line("output", self.output.display().to_string());
        s
    }
}
