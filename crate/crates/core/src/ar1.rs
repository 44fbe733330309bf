//! Linearised boundary model for two categories on `[0, 1]` with uniform
//! arrivals.
//!
//! The state `Z = (x₁, x₂, w₁, w₂)` evolves by an exact random map `Φ(Z, z)`.
//! Its mean map `F(Z) = E[Φ(Z, z)]` has the fixed point
//! `Z* = (1/4, 3/4, W/2, W/2)`; linearising about it gives
//! `y' = J y + H^{1/2} ξ` with `ξ ~ N(0, I)`. Projecting onto the boundary
//! `b = (x₁ + x₂)/2` yields the scalar AR(1) process
//!
//! ```text
//! Y' = K Y + σ η,   Y = b - 1/2,
//! K = (3 - e^{-λ}) / (2(2 - e^{-λ})),   σ = (1 - e^{-λ}) / (4√3 (2 - e^{-λ})).
//! ```
//!
//! Everything here is closed form except [`mean_map`] and
//! [`perturbation_covariance`], which integrate `Φ` numerically and serve as
//! independent checks on `Z*`, `J` and `H`.

use nalgebra::{Matrix4, Vector4};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{limit_weight, ModelConfig};

/// `(1 - e^{-λ})`, accurate for small `λ`.
fn one_minus_decay(lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Parameter(format!(
            "decay rate must be > 0, got {lambda}"
        )));
    }
    Ok(-(-lambda).exp_m1())
}

/// Run length standing in for `n = ∞`: `⌈400/λ⌉`.
pub fn equilibrium_steps(lambda: f64) -> u64 {
    (400.0 / lambda).ceil() as u64
}

/// Time index for variance predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Horizon {
    Steps(u64),
    Infinite,
}

/// `Z* = (1/4, 3/4, W/2, W/2)`.
pub fn fixed_point(lambda: f64) -> Result<Vector4<f64>> {
    let w = limit_weight(lambda)?;
    Ok(Vector4::new(0.25, 0.75, 0.5 * w, 0.5 * w))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Linearization {
    /// Jacobian of the mean map at `Z*`.
    pub jacobian: Matrix4<f64>,
    /// Covariance of `Φ(Z*, z) - F(Z*)`.
    pub noise_cov: Matrix4<f64>,
    pub noise_cov_sqrt: Matrix4<f64>,
}

pub fn linearization(lambda: f64) -> Result<Linearization> {
    let om = one_minus_decay(lambda)?;
    let e = (-lambda).exp();
    let tm = 1.0 + om; // 2 - e^{-λ}

    let diag = (4.0 + om) / (4.0 * tm); // (5 - e)/(4(2 - e))
    let off = om / (4.0 * tm);
    #[rustfmt::skip]
    let jacobian = Matrix4::new(
        diag, off,  0.0, 0.0,
        off,  diag, 0.0, 0.0,
        0.5,  0.5,  e,   0.0,
        -0.5, -0.5, 0.0, e,
    );

    let mean_var = om * om / (24.0 * tm * tm);
    #[rustfmt::skip]
    let noise_cov = Matrix4::new(
        mean_var, 0.0,      0.0,   0.0,
        0.0,      mean_var, 0.0,   0.0,
        0.0,      0.0,      0.25,  -0.25,
        0.0,      0.0,      -0.25, 0.25,
    );

    let s = om / (3f64.sqrt() * tm);
    #[rustfmt::skip]
    let noise_cov_sqrt = Matrix4::new(
        s,   0.0, 0.0,  0.0,
        0.0, s,   0.0,  0.0,
        0.0, 0.0, 1.0,  -1.0,
        0.0, 0.0, -1.0, 1.0,
    ) / (2.0 * 2f64.sqrt());

    Ok(Linearization {
        jacobian,
        noise_cov,
        noise_cov_sqrt,
    })
}

/// AR(1) coefficient and noise scale of the boundary, `(K, σ)`.
pub fn boundary_params(lambda: f64) -> Result<(f64, f64)> {
    let om = one_minus_decay(lambda)?;
    let tm = 1.0 + om;
    Ok(((2.0 + om) / (2.0 * tm), om / (4.0 * 3f64.sqrt() * tm)))
}

/// `Y' = K Y + σ η` with `Y⁰ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Process {
    pub coefficient: f64,
    pub sigma: f64,
    /// `1 - K`, kept separately so it does not cancel when `K` is close to 1.
    one_minus_coefficient: f64,
}

impl Ar1Process {
    pub fn new(coefficient: f64, sigma: f64) -> Result<Self> {
        if !(coefficient.abs() < 1.0) || !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter(format!(
                "AR(1) needs |K| < 1 and σ >= 0, got K = {coefficient}, σ = {sigma}"
            )));
        }
        Ok(Self {
            coefficient,
            sigma,
            one_minus_coefficient: 1.0 - coefficient,
        })
    }

    pub fn for_boundary(lambda: f64) -> Result<Self> {
        let om = one_minus_decay(lambda)?;
        let (coefficient, sigma) = boundary_params(lambda)?;
        Ok(Self {
            coefficient,
            sigma,
            one_minus_coefficient: om / (2.0 * (1.0 + om)),
        })
    }

    fn one_minus_k_squared(&self) -> f64 {
        self.one_minus_coefficient * (1.0 + self.coefficient)
    }

    /// `Var[Yⁿ] = σ² (1 - K^{2n}) / (1 - K²)`.
    pub fn variance(&self, horizon: Horizon) -> f64 {
        let s2 = self.sigma * self.sigma;
        match horizon {
            Horizon::Infinite => s2 / self.one_minus_k_squared(),
            Horizon::Steps(0) => 0.0,
            Horizon::Steps(n) => {
                let log_k2 = 2.0 * (-self.one_minus_coefficient).ln_1p();
                s2 * -(n as f64 * log_k2).exp_m1() / self.one_minus_k_squared()
            }
        }
    }

    /// `C_r = σ² K^{|r|} / (1 - K²)`.
    pub fn autocovariance(&self, lag: i64) -> f64 {
        self.variance(Horizon::Infinite)
            * self
                .coefficient
                .powi(lag.unsigned_abs().min(i32::MAX as u64) as i32)
    }

    /// `Y⁰, …, Y^{n_steps}`.
    pub fn simulate<R: Rng + ?Sized>(&self, n_steps: usize, rng: &mut R) -> Vec<f64> {
        let mut out = Vec::with_capacity(n_steps + 1);
        let mut y = 0.0;
        out.push(y);
        for _ in 0..n_steps {
            let eta: f64 = rng.sample(StandardNormal);
            y = self.coefficient * y + self.sigma * eta;
            out.push(y);
        }
        out
    }
}

pub fn variance_of_y(lambda: f64, horizon: Horizon) -> Result<f64> {
    Ok(Ar1Process::for_boundary(lambda)?.variance(horizon))
}

pub fn stationary_autocovariance(lambda: f64, lag: i64) -> Result<f64> {
    Ok(Ar1Process::for_boundary(lambda)?.autocovariance(lag))
}

pub fn simulate_ar1<R: Rng + ?Sized>(lambda: f64, n_steps: usize, rng: &mut R) -> Result<Vec<f64>> {
    Ok(Ar1Process::for_boundary(lambda)?.simulate(n_steps, rng))
}

/// All closed-form quantities for one decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Ar1Params {
    pub lambda: f64,
    pub coefficient: f64,
    pub sigma: f64,
    pub limit_weight: f64,
    pub fixed_point: Vector4<f64>,
    pub jacobian: Matrix4<f64>,
    pub noise_cov: Matrix4<f64>,
    pub noise_cov_sqrt: Matrix4<f64>,
}

impl Ar1Params {
    pub fn new(lambda: f64) -> Result<Self> {
        let (coefficient, sigma) = boundary_params(lambda)?;
        let Linearization {
            jacobian,
            noise_cov,
            noise_cov_sqrt,
        } = linearization(lambda)?;
        Ok(Self {
            lambda,
            coefficient,
            sigma,
            limit_weight: limit_weight(lambda)?,
            fixed_point: fixed_point(lambda)?,
            jacobian,
            noise_cov,
            noise_cov_sqrt,
        })
    }

    /// Only the two-category, uniform, unit-interval model with `λ > 0` has
    /// this reduction.
    pub fn for_config(config: &ModelConfig) -> Result<Self> {
        if !config.is_two_category_unit() {
            return Err(Error::Contract(
                "the AR(1) reduction is only defined for k = 2, uniform arrivals on [0, 1]".into(),
            ));
        }
        Self::new(config.lambda)
    }

    pub fn process(&self) -> Ar1Process {
        Ar1Process::for_boundary(self.lambda).expect("validated decay rate")
    }

    pub fn stationary_variance(&self) -> f64 {
        self.process().variance(Horizon::Infinite)
    }

    /// Largest eigenvalue modulus of `J`.
    pub fn spectral_radius(&self) -> f64 {
        self.jacobian
            .complex_eigenvalues()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// The exact one-step map `Φ(Z, z)` on `(x₁, x₂, w₁, w₂)`.
pub fn boundary_map(state: &Vector4<f64>, z: f64, lambda: f64) -> Vector4<f64> {
    let e = (-lambda).exp();
    let (x1, x2, w1, w2) = (state[0], state[1], state[2], state[3]);
    if z <= 0.5 * (x1 + x2) {
        let d = w1 * e;
        Vector4::new((x1 * d + z) / (d + 1.0), x2, d + 1.0, w2 * e)
    } else {
        let d = w2 * e;
        Vector4::new(x1, (x2 * d + z) / (d + 1.0), w1 * e, d + 1.0)
    }
}

/// Midpoint nodes and weights on `[0, 1]`, split at `b` so no panel straddles
/// the discontinuity of `Φ` in `z`.
fn split_midpoint_nodes(b: f64, nodes: usize) -> impl Iterator<Item = (f64, f64)> {
    let b = b.clamp(0.0, 1.0);
    let left = ((nodes as f64 * b).round() as usize).clamp(1, nodes.max(2) - 1);
    let right = nodes.max(2) - left;
    let panel = |lo: f64, hi: f64, n: usize| {
        let h = (hi - lo) / n as f64;
        (0..n).map(move |i| (lo + (i as f64 + 0.5) * h, h))
    };
    panel(0.0, b, left).chain(panel(b, 1.0, right))
}

/// `F(Z) = E[Φ(Z, z)]` for `z ~ U[0, 1]`.
pub fn mean_map(state: &Vector4<f64>, lambda: f64, nodes: usize) -> Vector4<f64> {
    let b = 0.5 * (state[0] + state[1]);
    split_midpoint_nodes(b, nodes)
        .map(|(z, h)| boundary_map(state, z, lambda) * h)
        .sum()
}

/// `E[(Φ(Z, z) - F(Z))(Φ(Z, z) - F(Z))ᵀ]` for `z ~ U[0, 1]`.
pub fn perturbation_covariance(state: &Vector4<f64>, lambda: f64, nodes: usize) -> Matrix4<f64> {
    let mean = mean_map(state, lambda, nodes);
    let b = 0.5 * (state[0] + state[1]);
    split_midpoint_nodes(b, nodes)
        .map(|(z, h)| {
            let g = boundary_map(state, z, lambda) - mean;
            g * g.transpose() * h
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Decay, Domain, Points, SystemState};
    use crate::rng::{stream, StreamKind};
    use rand::Rng;
    use std::f64::consts::LN_2;

    #[test]
    fn fixed_point_examples() {
        let z = fixed_point(LN_2).unwrap();
        assert_eq!(z, Vector4::new(0.25, 0.75, 1.0, 1.0));
        let z = fixed_point(50.0).unwrap();
        assert!((z[2] - 0.5).abs() < 1e-15 && (z[3] - 0.5).abs() < 1e-15);
        assert!(fixed_point(0.0).is_err());
    }

    #[test]
    fn mean_map_fixes_the_fixed_point() {
        for lambda in [0.001, 0.01, 0.1, 1.0, 3.0] {
            let z = fixed_point(lambda).unwrap();
            let f = mean_map(&z, lambda, 10_000);
            assert!(
                (f - z).amax() < 1e-10 * z.amax(),
                "λ = {lambda}: {f} vs {z}"
            );
        }
    }

    #[test]
    fn jacobian_examples_at_ln2() {
        let lin = linearization(LN_2).unwrap();
        assert!((lin.jacobian[(0, 0)] - 0.75).abs() < 1e-15);
        assert!((lin.jacobian[(0, 1)] - 1.0 / 12.0).abs() < 1e-15);
        assert!((lin.jacobian[(2, 2)] - 0.5).abs() < 1e-15);
    }

    /// Central differences of the quadrature mean map reproduce `J`.
    #[test]
    fn jacobian_matches_finite_differences() {
        for lambda in [0.01, 0.1, LN_2, 2.0] {
            let z = fixed_point(lambda).unwrap();
            let lin = linearization(lambda).unwrap();
            for col in 0..4 {
                let h = 1e-3 * z[col].abs().max(1.0);
                let mut plus = z;
                let mut minus = z;
                plus[col] += h;
                minus[col] -= h;
                let d = (mean_map(&plus, lambda, 20_000) - mean_map(&minus, lambda, 20_000))
                    / (2.0 * h);
                for row in 0..4 {
                    assert!(
                        (d[row] - lin.jacobian[(row, col)]).abs() < 1e-6,
                        "λ = {lambda}, J[{row},{col}]: fd {} vs {}",
                        d[row],
                        lin.jacobian[(row, col)]
                    );
                }
            }
        }
    }

    #[test]
    fn noise_covariance_matches_quadrature() {
        for lambda in [0.01, 0.1, 1.0] {
            let z = fixed_point(lambda).unwrap();
            let lin = linearization(lambda).unwrap();
            let h = perturbation_covariance(&z, lambda, 100_000);
            let scale = lin.noise_cov.amax();
            assert!(
                (h - lin.noise_cov).amax() < 1e-8 * scale,
                "λ = {lambda}\n{h}\n{}",
                lin.noise_cov
            );
        }
    }

    #[test]
    fn square_root_and_reduction_identities() {
        for lambda in [1e-3, 0.05, LN_2, 3.0] {
            let p = Ar1Params::new(lambda).unwrap();
            let sq = p.noise_cov_sqrt * p.noise_cov_sqrt;
            assert!((sq - p.noise_cov).amax() < 1e-12);
            assert_eq!(p.noise_cov, p.noise_cov.transpose());
            assert!((p.coefficient - (p.jacobian[(0, 0)] + p.jacobian[(0, 1)])).abs() < 1e-12);
            assert!((p.sigma - (p.noise_cov[(0, 0)] / 2.0).sqrt()).abs() < 1e-12);
            assert!(p.coefficient > 0.0 && p.coefficient < 1.0);
            assert!(p.spectral_radius() < 1.0);
        }
    }

    #[test]
    fn boundary_params_examples() {
        let (k, s) = boundary_params(LN_2).unwrap();
        assert!((k - 2.5 / 3.0).abs() < 1e-15);
        assert!((s - 0.5 / (4.0 * 3f64.sqrt() * 1.5)).abs() < 1e-15);
        assert!((s - 0.048113).abs() < 1e-6);

        let (k, s) = boundary_params(1e-9).unwrap();
        assert!((1.0 - k) < 1e-9 && s < 1e-9);

        let (k, s) = boundary_params(60.0).unwrap();
        assert!((k - 0.75).abs() < 1e-12);
        assert!((s - 1.0 / (8.0 * 3f64.sqrt())).abs() < 1e-12);

        assert!(boundary_params(0.0).is_err());
        assert!(boundary_params(f64::NAN).is_err());
    }

    #[test]
    fn variance_examples() {
        let (_, s) = boundary_params(LN_2).unwrap();
        assert_eq!(variance_of_y(LN_2, Horizon::Steps(0)).unwrap(), 0.0);
        assert!((variance_of_y(LN_2, Horizon::Steps(1)).unwrap() - s * s).abs() < 1e-17);
        let v = variance_of_y(LN_2, Horizon::Infinite).unwrap();
        // σ² / (1 - K²) with σ² = 1/432, K² = 25/36
        let exact = (1.0 / 432.0) / (11.0 / 36.0);
        assert!((v - exact).abs() < 1e-15);
        assert!((v - 7.576e-3).abs() < 1e-6);
        let c1 = stationary_autocovariance(LN_2, 1).unwrap();
        assert!((c1 - 2.5 / 3.0 * exact).abs() < 1e-15);
        assert!((c1 - 6.313e-3).abs() < 1e-6);
        assert_eq!(stationary_autocovariance(LN_2, 0).unwrap(), v);
        assert_eq!(
            stationary_autocovariance(LN_2, -3).unwrap(),
            stationary_autocovariance(LN_2, 3).unwrap()
        );
    }

    #[test]
    fn variance_sums_match_closed_form() {
        for lambda in [0.005, 0.2, 2.0] {
            let (k, s) = boundary_params(lambda).unwrap();
            let mut sum = 0.0;
            for n in 0..400u64 {
                let v = variance_of_y(lambda, Horizon::Steps(n)).unwrap();
                assert!((v - sum).abs() <= 1e-12 * sum.max(1e-300));
                sum += k.powi(2 * n as i32) * s * s;
            }
        }
    }

    #[test]
    fn variance_is_monotone_and_bounded() {
        for lambda in [0.001, 0.05, 1.0] {
            let inf = variance_of_y(lambda, Horizon::Infinite).unwrap();
            let mut prev = 0.0;
            for n in (0..200_000u64).step_by(997) {
                let v = variance_of_y(lambda, Horizon::Steps(n)).unwrap();
                assert!(v >= prev && v <= inf * (1.0 + 1e-12));
                prev = v;
            }
            let late = variance_of_y(lambda, Horizon::Steps(equilibrium_steps(lambda))).unwrap();
            assert!((late - inf).abs() < 1e-12 * inf);
        }
    }

    #[test]
    fn exact_map_agrees_with_model_step() {
        let lambda = 0.07;
        let decay = Decay::new(lambda).unwrap();
        let mut rng = stream(1, StreamKind::Dynamics, 0);
        let mut state = SystemState::new(Points::line(&[0.3, 0.6]), vec![4.0, 9.0]).unwrap();
        let mut z4 = Vector4::new(0.3, 0.6, 4.0, 9.0);
        for _ in 0..1000 {
            let z: f64 = rng.random();
            z4 = boundary_map(&z4, z, lambda);
            state.advance(&[z], decay);
            let m = state.means();
            let expected = Vector4::new(
                m.get(0)[0],
                m.get(1)[0],
                state.weights()[0],
                state.weights()[1],
            );
            assert!((z4 - expected).amax() < 1e-12);
        }
    }

    #[test]
    fn simulate_is_deterministic_and_noise_free_when_sigma_zero() {
        let a = simulate_ar1(0.05, 1000, &mut stream(3, StreamKind::Ar1, 0)).unwrap();
        let b = simulate_ar1(0.05, 1000, &mut stream(3, StreamKind::Ar1, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 1001);
        assert_eq!(a[0], 0.0);
        let quiet = Ar1Process::new(0.9, 0.0).unwrap();
        assert!(quiet
            .simulate(500, &mut stream(3, StreamKind::Ar1, 1))
            .iter()
            .all(|y| *y == 0.0));
    }

    #[test]
    fn simulated_moments_match_closed_form() {
        let lambda = 0.3;
        let process = Ar1Process::for_boundary(lambda).unwrap();
        let ys = process.simulate(2_000_000, &mut stream(8, StreamKind::Ar1, 0));
        let ys = &ys[1000..];
        // batch means; batches are much longer than the correlation time
        let batches: Vec<(f64, f64)> = ys
            .chunks_exact(20_000)
            .map(|c| {
                let v = c.iter().map(|y| y * y).sum::<f64>() / c.len() as f64;
                let a = c.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (c.len() - 1) as f64;
                (v, a)
            })
            .collect();
        let nb = batches.len() as f64;
        for (idx, target) in [
            (0, process.variance(Horizon::Infinite)),
            (1, process.autocovariance(1)),
        ] {
            let vals: Vec<f64> = batches
                .iter()
                .map(|b| if idx == 0 { b.0 } else { b.1 })
                .collect();
            let mean = vals.iter().sum::<f64>() / nb;
            let se = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nb - 1.0)).sqrt()
                / nb.sqrt();
            assert!(
                (mean - target).abs() < 3.0 * se,
                "lag {idx}: {mean} vs {target} (se {se})"
            );
        }
    }

    #[test]
    fn restricted_to_two_category_unit_interval() {
        let mut config =
            crate::model::ModelConfig::two_category_unit(0.1, [0.25, 0.75], [5.0, 5.0], 0).unwrap();
        assert!(Ar1Params::for_config(&config).is_ok());
        config.k = 3;
        assert!(matches!(
            Ar1Params::for_config(&config),
            Err(Error::Contract(_))
        ));
        config.k = 2;
        config.domain = Domain::new(vec![0.0], vec![2.0]).unwrap();
        assert!(Ar1Params::for_config(&config).is_err());
    }
}
