use rayon::prelude::*;

use crate::ar1::{equilibrium_steps, fixed_point, Horizon};
use crate::error::{Error, Result};
use crate::model::{ModelConfig, Simulation};
use crate::rng::{stream, SimRng, StreamKind};

/// Ensemble statistics of one scalar at one `(λ, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleEstimate {
    pub quantity: String,
    pub lambda: f64,
    /// Requested horizon; `Infinite` is realised as `⌈400/λ⌉` steps.
    pub horizon: Horizon,
    pub n: u64,
    pub replicas: usize,
    pub mean: f64,
    pub mean_stderr: f64,
    /// Unbiased sample variance across replicas.
    pub variance: f64,
    /// Standard error of `variance`: sample std of the squared deviations
    /// over `√N`.
    pub variance_stderr: f64,
}

/// Dynamics stream of one replica in a variance curve. The high bits carry
/// the position of `λ` in the grid so rows never share streams.
pub fn curve_stream(master_seed: u64, lambda_index: usize, replica: usize) -> SimRng {
    stream(
        master_seed,
        StreamKind::Dynamics,
        ((lambda_index as u64) << 32) | replica as u64,
    )
}

/// Boundary values of one replica started at the fixed point, observed at
/// the given (sorted, ascending) step counts.
pub fn boundary_replica(lambda: f64, checkpoints: &[u64], rng: SimRng) -> Result<Vec<f64>> {
    let z = fixed_point(lambda)?;
    let config = ModelConfig::two_category_unit(lambda, [z[0], z[1]], [z[2], z[3]], 0)?;
    let mut sim = Simulation::new(&config, rng)?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut n = 0u64;
    for &target in checkpoints {
        debug_assert!(target >= n, "checkpoints must be ascending");
        sim.run(target - n)?;
        n = target;
        let m = sim.state().means();
        out.push(0.5 * (m.get(0)[0] + m.get(1)[0]));
    }
    Ok(out)
}

fn summarise(values: &[f64]) -> (f64, f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sq: Vec<f64> = values.iter().map(|b| (b - mean) * (b - mean)).collect();
    let ss = sq.iter().sum::<f64>();
    let variance = ss / (n - 1.0);
    let mean_stderr = variance.sqrt() / n.sqrt();
    let sq_mean = ss / n;
    let sq_var = sq
        .iter()
        .map(|s| (s - sq_mean) * (s - sq_mean))
        .sum::<f64>()
        / (n - 1.0);
    (mean, mean_stderr, variance, sq_var.sqrt() / n.sqrt())
}

/// Monte Carlo variance of the boundary `bⁿ` started from `Z*`, for every
/// `λ` in `lambdas` and every horizon in `horizons`.
///
/// Replicas run in parallel; results are collected in replica order, so the
/// output depends only on the arguments.
pub fn boundary_variance_curve(
    lambdas: &[f64],
    horizons: &[Horizon],
    replicas: usize,
    master_seed: u64,
) -> Result<Vec<EnsembleEstimate>> {
    if replicas < 2 {
        return Err(Error::Parameter(format!(
            "need at least 2 replicas, got {replicas}"
        )));
    }
    if replicas as u64 > u32::MAX as u64 {
        return Err(Error::Parameter(format!("too many replicas: {replicas}")));
    }
    let mut out = Vec::with_capacity(lambdas.len() * horizons.len());
    for (li, &lambda) in lambdas.iter().enumerate() {
        fixed_point(lambda)?;
        let steps: Vec<u64> = horizons
            .iter()
            .map(|h| match h {
                Horizon::Steps(n) => *n,
                Horizon::Infinite => equilibrium_steps(lambda),
            })
            .collect();
        let mut checkpoints = steps.clone();
        checkpoints.sort_unstable();
        checkpoints.dedup();

        let runs: Vec<Vec<f64>> = (0..replicas)
            .into_par_iter()
            .map(|r| boundary_replica(lambda, &checkpoints, curve_stream(master_seed, li, r)))
            .collect::<Result<_>>()?;

        for (h, n) in horizons.iter().zip(&steps) {
            let col = checkpoints.binary_search(n).expect("checkpoint present");
            let values: Vec<f64> = runs.iter().map(|run| run[col]).collect();
            let (mean, mean_stderr, variance, variance_stderr) = summarise(&values);
            out.push(EnsembleEstimate {
                quantity: "boundary".into(),
                lambda,
                horizon: *h,
                n: *n,
                replicas,
                mean,
                mean_stderr,
                variance,
                variance_stderr,
            });
        }
    }
    Ok(out)
}
