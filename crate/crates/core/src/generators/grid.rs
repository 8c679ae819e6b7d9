use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::GenError;
use crate::instance::{Graph, Instance, InstanceMeta, Point};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CbdCount {
    Fixed(u8),
    /// Uniform in 1..=3.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCityParams {
    pub width: usize,
    pub n_cbds: CbdCount,
    pub total_population: f64,
    pub noise_fraction: f64,
    pub seed: u64,
}

impl Default for GridCityParams {
    fn default() -> Self {
        GridCityParams {
            width: 8,
            n_cbds: CbdCount::Random,
            total_population: 500_000.0,
            noise_fraction: 0.10,
            seed: 0,
        }
    }
}

impl GridCityParams {
    fn validate(&self) -> Result<(), GenError> {
        if self.width < 2 {
            return Err(GenError::InvalidParams(format!(
                "width must be >= 2, got {}",
                self.width
            )));
        }
        if let CbdCount::Fixed(k) = self.n_cbds {
            if !(1..=3).contains(&k) {
                return Err(GenError::InvalidParams(format!(
                    "n_cbds must be in 1..=3, got {k}"
                )));
            }
        }
        if !(0.0..1.0).contains(&self.noise_fraction) {
            return Err(GenError::InvalidParams(format!(
                "noise_fraction must be in [0, 1), got {}",
                self.noise_fraction
            )));
        }
        if !(self.total_population > 0.0) || !self.total_population.is_finite() {
            return Err(GenError::InvalidParams(
                "total_population must be positive".into(),
            ));
        }
        Ok(())
    }
}

struct Cbd {
    cx: f64,
    cy: f64,
    sx: f64,
    sy: f64,
    share: f64,
}

/// `w x w` lattice with 8-neighbour edges. Node `r * w + c` sits at `(c, r)`.
///
/// Demand is `noise_fraction` of the population spread evenly plus the rest
/// split over 1 to 3 Gaussian business districts.
pub fn gen_grid_city(params: &GridCityParams) -> Result<Instance, GenError> {
    params.validate()?;
    let w = params.width;
    let mut rng = rng::seeded(params.seed);
    let k = match params.n_cbds {
        CbdCount::Fixed(k) => k as usize,
        CbdCount::Random => rng.random_range(1..=3),
    };
    let wf = w as f64;
    let mut cbds: Vec<Cbd> = (0..k)
        .map(|_| Cbd {
            cx: rng.random_range(0.2 * wf..=0.8 * wf),
            cy: rng.random_range(0.2 * wf..=0.8 * wf),
            sx: rng.random_range(0.1 * wf..=0.3 * wf),
            sy: rng.random_range(0.1 * wf..=0.3 * wf),
            share: rng.sample(Exp1),
        })
        .collect();
    let share_sum: f64 = cbds.iter().map(|c| c.share).sum();
    for c in &mut cbds {
        c.share /= share_sum;
    }

    let nodes: Vec<Point> = (0..w * w)
        .map(|i| Point::new((i % w) as f64, (i / w) as f64))
        .collect();
    let mut pairs = Vec::new();
    for r in 0..w {
        for c in 0..w {
            let id = r * w + c;
            if c + 1 < w {
                pairs.push((id, id + 1));
            }
            if r + 1 < w {
                pairs.push((id, id + w));
                if c + 1 < w {
                    pairs.push((id, id + w + 1));
                }
                if c > 0 {
                    pairs.push((id, id + w - 1));
                }
            }
        }
    }
    let graph = Graph::euclidean(nodes, &pairs)?;

    let n = w * w;
    let total = params.total_population;
    let floor = params.noise_fraction * total / n as f64;
    let mut demand = vec![floor; n];
    let cbd_total = (1.0 - params.noise_fraction) * total;
    for cbd in &cbds {
        let mass: Vec<f64> = graph
            .nodes()
            .iter()
            .map(|p| {
                let zx = (p.x - cbd.cx) / cbd.sx;
                let zy = (p.y - cbd.cy) / cbd.sy;
                (-0.5 * (zx * zx + zy * zy)).exp()
            })
            .collect();
        let norm: f64 = mass.iter().sum();
        for (d, m) in demand.iter_mut().zip(&mass) {
            *d += cbd_total * cbd.share * m / norm;
        }
    }

    let mut meta_params = BTreeMap::new();
    meta_params.insert("w".to_string(), w.to_string());
    meta_params.insert("n_cbds".to_string(), k.to_string());
    meta_params.insert("total_population".to_string(), total.to_string());
    meta_params.insert(
        "noise_fraction".to_string(),
        params.noise_fraction.to_string(),
    );
    let meta = InstanceMeta {
        generator: "grid".into(),
        seed: params.seed,
        params: meta_params,
    };
    Ok(Instance::new(graph, demand, meta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::io;

    #[test]
    fn two_by_two_has_six_edges() {
        let inst = gen_grid_city(&GridCityParams {
            width: 2,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(inst.n(), 4);
        assert_eq!(inst.graph().edges().len(), 6);
        assert_eq!(inst.d(0, 3), std::f64::consts::SQRT_2);
    }

    #[test]
    fn eight_neighbour_edge_count() {
        // Orthogonal 2w(w-1) plus diagonal 2(w-1)^2.
        for w in 2..7 {
            let inst = gen_grid_city(&GridCityParams {
                width: w,
                ..Default::default()
            })
            .unwrap();
            assert_eq!(
                inst.graph().edges().len(),
                2 * w * (w - 1) + 2 * (w - 1) * (w - 1)
            );
        }
    }

    #[test]
    fn population_total_and_floor() {
        for seed in 0..20 {
            let params = GridCityParams {
                width: 8,
                seed,
                ..Default::default()
            };
            let inst = gen_grid_city(&params).unwrap();
            let total = inst.total_demand();
            assert!(
                (total - 500_000.0).abs() <= 1e-6 * 500_000.0,
                "total {total}"
            );
            let floor = 0.1 * 500_000.0 / 64.0;
            assert!(inst.demand().iter().all(|&d| d >= floor * (1.0 - 1e-12)));
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let params = GridCityParams {
            width: 6,
            seed: 42,
            ..Default::default()
        };
        let a = io::to_text(&gen_grid_city(&params).unwrap()).unwrap();
        let b = io::to_text(&gen_grid_city(&params).unwrap()).unwrap();
        assert_eq!(a, b);
        let c =
            io::to_text(&gen_grid_city(&GridCityParams { seed: 43, ..params }).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_params() {
        assert!(gen_grid_city(&GridCityParams {
            width: 1,
            ..Default::default()
        })
        .is_err());
        assert!(gen_grid_city(&GridCityParams {
            n_cbds: CbdCount::Fixed(4),
            ..Default::default()
        })
        .is_err());
        assert!(gen_grid_city(&GridCityParams {
            noise_fraction: 1.0,
            ..Default::default()
        })
        .is_err());
    }
}
