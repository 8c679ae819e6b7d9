//! Solving the p-median problem from scratch: initializers, construction
//! baselines and the swap-based driver.

mod baselines;
mod init;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{objective, Instance, InstanceError};
use crate::rng;
use crate::swap::{run_swaps, SwapAgent, SwapError};

pub use baselines::{
    greedy_addition, kmeans_baseline, maranzana, maranzana_with_history, KMEANS_MAX_ITER,
    KMEANS_SHIFT_TOL,
};
pub use init::{density_init, random_init, Initializer, DENSITY_FLOOR};

pub(crate) const IMPROVE_TOL: f64 = crate::swap::IMPROVE_TOL;

#[derive(Debug, Error)]
pub enum PmpError {
    #[error("p = {p} must be in 1..={n}")]
    InvalidP { p: usize, n: usize },
    #[error("{0}")]
    InvalidParams(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Swap(#[from] SwapError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmpResult {
    pub facilities: Vec<usize>,
    pub objective: f64,
    /// `(objective - optimum) / optimum` once an optimum is known.
    pub gap: Option<f64>,
    /// Wall-clock seconds.
    pub runtime: f64,
    pub method: String,
    pub trials: usize,
}

impl PmpResult {
    pub(crate) fn evaluate(
        instance: &Instance,
        mut facilities: Vec<usize>,
        method: &str,
        trials: usize,
        start: Instant,
    ) -> Result<Self, PmpError> {
        facilities.sort_unstable();
        let objective = objective(instance, &facilities)?;
        Ok(Self {
            facilities,
            objective,
            gap: None,
            runtime: start.elapsed().as_secs_f64(),
            method: method.to_string(),
            trials,
        })
    }

    pub fn with_gap(mut self, optimum: f64) -> Self {
        self.gap = Some(optimality_gap(self.objective, optimum));
        self
    }
}

pub fn optimality_gap(objective: f64, optimum: f64) -> f64 {
    if optimum > 0.0 {
        (objective - optimum) / optimum
    } else if objective > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Runs `trial(seed_t)` for `trials` derived seeds and keeps the lowest
/// objective (earliest trial on ties).
pub fn best_of<F>(
    trials: usize,
    seed: u64,
    method: &str,
    mut trial: F,
) -> Result<PmpResult, PmpError>
where
    F: FnMut(u64) -> Result<PmpResult, PmpError>,
{
    if trials == 0 {
        return Err(PmpError::InvalidParams("trials must be at least 1".into()));
    }
    let start = Instant::now();
    let mut best: Option<PmpResult> = None;
    for t in 0..trials {
        let r = trial(rng::derive_seed(seed, t as u64))?;
        if best.as_ref().is_none_or(|b| r.objective < b.objective) {
            best = Some(r);
        }
    }
    let mut best = best.expect("trials >= 1");
    best.method = method.to_string();
    best.trials = trials;
    best.runtime = start.elapsed().as_secs_f64();
    Ok(best)
}

/// The swap-based p-median solver: each of `trials` trials draws a fresh
/// start with `init`, then lets `agent` make up to `swaps` swaps (default
/// `p`). With the greedy agent this is Teitz-Bart interchange.
pub fn solve_pmp<A: SwapAgent + ?Sized>(
    instance: &Instance,
    p: usize,
    agent: &mut A,
    trials: usize,
    swaps: Option<usize>,
    init: Initializer,
    seed: u64,
) -> Result<PmpResult, PmpError> {
    init::check_p(instance, p)?;
    let swaps = swaps.unwrap_or(p);
    if swaps == 0 {
        return Err(PmpError::InvalidParams(
            "swap budget S must be at least 1".into(),
        ));
    }
    let method = agent.name().to_string();
    best_of(trials, seed, &method, |s| {
        let start = Instant::now();
        let f0 = init.draw(instance, p, s)?;
        let plan = run_swaps(instance, &f0, swaps, agent, 1, s)?;
        PmpResult::evaluate(instance, plan.facilities, &method, 1, start)
    })
}

/// Best of `trials` uniformly random facility sets.
pub fn random_baseline(
    instance: &Instance,
    p: usize,
    trials: usize,
    seed: u64,
) -> Result<PmpResult, PmpError> {
    best_of(trials, seed, "random", |s| {
        let start = Instant::now();
        PmpResult::evaluate(instance, random_init(instance, p, s)?, "random", 1, start)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_grid_city, GridCityParams};
    use crate::instance::exact_solve;
    use crate::instance::fixtures::path4;
    use crate::swap::{GreedySwapAgent, RandomSwapAgent};

    #[test]
    fn greedy_matches_exact_on_trivial_cases() {
        let inst = path4(vec![1.0, 2.0, 3.0, 4.0]);
        let full = solve_pmp(
            &inst,
            4,
            &mut GreedySwapAgent,
            1,
            None,
            Initializer::Density,
            0,
        )
        .unwrap();
        assert_eq!(full.objective, 0.0);
        // Unique 1-median of demands [1,2,3,4] on the path is node 2.
        let one = solve_pmp(
            &inst,
            1,
            &mut GreedySwapAgent,
            5,
            None,
            Initializer::Random,
            0,
        )
        .unwrap();
        let opt = exact_solve(&inst, 1).unwrap();
        assert_eq!(one.facilities, opt.facilities);
        assert_eq!(one.with_gap(opt.objective).gap, Some(0.0));
    }

    #[test]
    fn result_not_worse_than_any_start() {
        for seed in 0..5 {
            let inst = gen_grid_city(&GridCityParams {
                width: 6,
                seed,
                ..Default::default()
            })
            .unwrap();
            let r = solve_pmp(
                &inst,
                4,
                &mut GreedySwapAgent,
                3,
                None,
                Initializer::Density,
                seed,
            )
            .unwrap();
            for t in 0..3 {
                let f0 = density_init(&inst, 4, rng::derive_seed(seed, t)).unwrap();
                assert!(r.objective <= objective(&inst, &f0).unwrap());
            }
            let opt = exact_solve(&inst, 4).unwrap().objective;
            assert!(r.with_gap(opt).gap.unwrap() >= -1e-12);
        }
    }

    #[test]
    fn single_random_swap_budget() {
        let inst = gen_grid_city(&GridCityParams {
            width: 4,
            seed: 1,
            ..Default::default()
        })
        .unwrap();
        let r = solve_pmp(
            &inst,
            3,
            &mut RandomSwapAgent::new(5),
            1,
            Some(1),
            Initializer::Density,
            8,
        )
        .unwrap();
        let f0 = density_init(&inst, 3, rng::derive_seed(8, 0)).unwrap();
        let diff = r.facilities.iter().filter(|f| !f0.contains(f)).count();
        assert!(diff <= 1);
        assert!(matches!(
            solve_pmp(
                &inst,
                3,
                &mut GreedySwapAgent,
                1,
                Some(0),
                Initializer::Density,
                0
            ),
            Err(PmpError::InvalidParams(_))
        ));
    }

    #[test]
    fn gap_definition() {
        assert_eq!(optimality_gap(11.0, 10.0), 0.1);
        assert_eq!(optimality_gap(0.0, 0.0), 0.0);
        assert!(optimality_gap(1.0, 0.0).is_infinite());
    }
}
