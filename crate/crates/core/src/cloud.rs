//! Individual exemplars, kept only for plotting.
//!
//! The dynamics never read this structure. It mirrors the state update at the
//! exemplar level so that each category's weighted mean equals the state's
//! mean. Exemplars whose weight falls to the prune threshold or below are
//! dropped from the list but their mass and first moment are retained in a
//! per-category aggregate, so the mean identity survives pruning.

use crate::model::{Decay, Points};

#[derive(Debug, Clone, PartialEq)]
pub struct Exemplar {
    pub location: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, Default)]
struct Category {
    live: Vec<Exemplar>,
    pruned_mass: f64,
    pruned_moment: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExemplarCloud {
    dim: usize,
    prune_threshold: f64,
    categories: Vec<Category>,
}

impl ExemplarCloud {
    pub const DEFAULT_PRUNE_THRESHOLD: f64 = 0.01;

    pub fn new(dim: usize, k: usize, prune_threshold: f64) -> Self {
        let categories = (0..k)
            .map(|_| Category {
                pruned_moment: vec![0.0; dim],
                ..Category::default()
            })
            .collect();
        Self {
            dim,
            prune_threshold: prune_threshold.max(0.0),
            categories,
        }
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune_threshold
    }

    pub fn k(&self) -> usize {
        self.categories.len()
    }

    /// Seed a category with an exemplar (initial conditions).
    pub fn insert(&mut self, category: usize, location: &[f64], weight: f64) {
        debug_assert_eq!(location.len(), self.dim);
        self.categories[category].live.push(Exemplar {
            location: location.to_vec(),
            weight,
        });
    }

    /// Mirror one model step: decay everything, add `z` to `category` with
    /// weight 1, then prune.
    pub fn record(&mut self, category: usize, z: &[f64], decay: Decay) {
        let factor = decay.factor();
        if factor != 1.0 {
            for cat in &mut self.categories {
                cat.pruned_mass *= factor;
                cat.pruned_moment.iter_mut().for_each(|m| *m *= factor);
                cat.live.iter_mut().for_each(|e| e.weight *= factor);
            }
        }
        self.insert(category, z, 1.0);
        self.prune();
    }

    fn prune(&mut self) {
        let threshold = self.prune_threshold;
        for cat in &mut self.categories {
            let Category {
                live,
                pruned_mass,
                pruned_moment,
            } = cat;
            live.retain(|e| {
                if e.weight > threshold {
                    return true;
                }
                *pruned_mass += e.weight;
                for (m, x) in pruned_moment.iter_mut().zip(&e.location) {
                    *m += e.weight * x;
                }
                false
            });
        }
    }

    /// Exemplars still above the prune threshold.
    pub fn live(&self, category: usize) -> &[Exemplar] {
        &self.categories[category].live
    }

    pub fn live_count(&self) -> usize {
        self.categories.iter().map(|c| c.live.len()).sum()
    }

    /// Weighted mean of every exemplar ever stored, pruned ones included.
    pub fn weighted_means(&self) -> Points {
        let mut coords = Vec::with_capacity(self.k() * self.dim);
        for cat in &self.categories {
            let mut mass = cat.pruned_mass;
            let mut moment = cat.pruned_moment.clone();
            for e in &cat.live {
                mass += e.weight;
                for (m, x) in moment.iter_mut().zip(&e.location) {
                    *m += e.weight * x;
                }
            }
            coords.extend(moment.into_iter().map(|m| m / mass));
        }
        Points::new(self.dim, coords).expect("cloud dimension")
    }

    pub fn total_weights(&self) -> Vec<f64> {
        self.categories
            .iter()
            .map(|c| c.pruned_mass + c.live.iter().map(|e| e.weight).sum::<f64>())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DistributionSpec, Domain, SystemState};
    use crate::rng::replica_stream;

    fn run(lambda: f64, threshold: f64, steps: usize) -> (SystemState, ExemplarCloud) {
        let domain = Domain::cube(2, 0.0, 10.0);
        let decay = Decay::new(lambda).unwrap();
        let mut cloud = ExemplarCloud::new(2, 3, threshold);
        let seeds = [[2.0, 2.0], [8.0, 3.0], [5.0, 8.0]];
        for (i, s) in seeds.iter().enumerate() {
            cloud.insert(i, s, 2.0);
            cloud.insert(i, &[s[0] + 0.5, s[1]], 1.0);
        }
        let means = cloud.weighted_means();
        let mut state = SystemState::new(means, cloud.total_weights()).unwrap();
        let mut rng = replica_stream(3, 0);
        for _ in 0..steps {
            let z = DistributionSpec::Uniform.sample(&domain, &mut rng).unwrap();
            let i = state.advance(&z, decay);
            cloud.record(i, &z, decay);
        }
        (state, cloud)
    }

    #[test]
    fn cloud_mean_tracks_state_mean_through_pruning() {
        for (lambda, threshold) in [(0.0, 0.01), (0.05, 0.01), (0.2, 0.3), (0.05, 0.0)] {
            let (state, cloud) = run(lambda, threshold, 3000);
            let cm = cloud.weighted_means();
            for i in 0..3 {
                for (a, b) in cm.get(i).iter().zip(state.means().get(i)) {
                    assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
                }
                let (wc, ws) = (cloud.total_weights()[i], state.weights()[i]);
                assert!((wc - ws).abs() <= 1e-9 * ws);
            }
        }
    }

    #[test]
    fn nothing_is_pruned_without_decay() {
        let (_, cloud) = run(0.0, 0.01, 500);
        assert_eq!(cloud.live_count(), 506);
    }

    #[test]
    fn pruned_cloud_holds_only_recent_exemplars() {
        let lambda: f64 = 0.05;
        let (_, cloud) = run(lambda, 0.01, 2000);
        // weight e^{-λa} > 0.01 iff age a < ln(100)/λ
        let max_age = (100f64.ln() / lambda).ceil() as usize;
        assert!(cloud.live_count() <= max_age);
        assert!(cloud.live_count() >= max_age - 1);
    }
}
