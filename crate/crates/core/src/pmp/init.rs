//! Initial facility sets.

use rand::seq::index;

use super::PmpError;
use crate::instance::Instance;
use crate::rng;

/// Selection weight floor so zero-demand nodes stay sampleable.
pub const DENSITY_FLOOR: f64 = 1e-9;

/// How `solve_pmp` draws each trial's starting set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Initializer {
    #[default]
    Density,
    Random,
}

impl Initializer {
    pub fn draw(self, instance: &Instance, p: usize, seed: u64) -> Result<Vec<usize>, PmpError> {
        match self {
            Initializer::Density => density_init(instance, p, seed),
            Initializer::Random => random_init(instance, p, seed),
        }
    }
}

pub(crate) fn check_p(instance: &Instance, p: usize) -> Result<(), PmpError> {
    if p == 0 || p > instance.n() {
        return Err(PmpError::InvalidP { p, n: instance.n() });
    }
    Ok(())
}

/// Samples `p` distinct nodes without replacement, node `i` weighted by
/// `demand[i]^(2/3)`.
pub fn density_init(instance: &Instance, p: usize, seed: u64) -> Result<Vec<usize>, PmpError> {
    check_p(instance, p)?;
    let weights: Vec<f64> = instance
        .demand()
        .iter()
        .map(|&d| d.powf(2.0 / 3.0).max(DENSITY_FLOOR))
        .collect();
    let mut rng = rng::seeded(seed);
    let picked = index::sample_weighted(&mut rng, instance.n(), |i| weights[i], p)
        .map_err(|e| PmpError::InvalidParams(format!("density weights: {e}")))?;
    let mut out = picked.into_vec();
    out.sort_unstable();
    Ok(out)
}

/// Samples `p` distinct nodes uniformly.
pub fn random_init(instance: &Instance, p: usize, seed: u64) -> Result<Vec<usize>, PmpError> {
    check_p(instance, p)?;
    let mut rng = rng::seeded(seed);
    let mut out = index::sample(&mut rng, instance.n(), p).into_vec();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::path4;
    use crate::instance::{Graph, InstanceMeta, Point};

    fn path3(demand: Vec<f64>) -> Instance {
        let nodes = (0..3).map(|i| Point::new(i as f64, 0.0)).collect();
        Instance::new(
            Graph::euclidean(nodes, &[(0, 1), (1, 2)]).unwrap(),
            demand,
            InstanceMeta::default(),
        )
        .unwrap()
    }

    #[test]
    fn density_probabilities_follow_two_thirds_power() {
        let inst = path3(vec![1.0, 8.0, 27.0]);
        let draws = 42_000;
        let mut counts = [0usize; 3];
        for s in 0..draws {
            counts[density_init(&inst, 1, s).unwrap()[0]] += 1;
        }
        let expected = [1.0 / 14.0, 4.0 / 14.0, 9.0 / 14.0];
        for (c, e) in counts.iter().zip(expected) {
            let mean = draws as f64 * e;
            let sd = (draws as f64 * e * (1.0 - e)).sqrt();
            assert!((*c as f64 - mean).abs() < 4.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn p_equals_n_returns_everything() {
        let inst = path4(vec![0.0, 1.0, 0.0, 100.0]);
        assert_eq!(density_init(&inst, 4, 3).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(random_init(&inst, 4, 3).unwrap(), vec![0, 1, 2, 3]);
        assert!(matches!(
            density_init(&inst, 5, 0),
            Err(PmpError::InvalidP { p: 5, n: 4 })
        ));
        assert!(matches!(
            random_init(&inst, 0, 0),
            Err(PmpError::InvalidP { .. })
        ));
    }

    #[test]
    fn random_init_is_uniform_over_pairs() {
        let nodes = (0..10).map(|i| Point::new(i as f64, 0.0)).collect();
        let pairs: Vec<_> = (0..9).map(|i| (i, i + 1)).collect();
        let inst = Instance::new(
            Graph::euclidean(nodes, &pairs).unwrap(),
            vec![1.0; 10],
            InstanceMeta::default(),
        )
        .unwrap();
        let draws = 10_000;
        let mut counts = std::collections::HashMap::new();
        for s in 0..draws {
            *counts
                .entry(random_init(&inst, 2, s).unwrap())
                .or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 45);
        let e = draws as f64 / 45.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 44 degrees of freedom, 0.999 quantile.
        assert!(chi2 < 78.75, "chi2 = {chi2}");
    }

    #[test]
    fn deterministic_under_seed() {
        let inst = path4(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            density_init(&inst, 2, 11).unwrap(),
            density_init(&inst, 2, 11).unwrap()
        );
        assert_eq!(
            random_init(&inst, 2, 11).unwrap(),
            random_init(&inst, 2, 11).unwrap()
        );
    }
}
