use rand::Rng;

use super::{is_improvement, Action, SwapAgent, SwapContext, SwapError};
use crate::instance::cell_costs;
use crate::rng::{self, Rng as SeededRng};

/// Uniform random pair from `F x (V \ F)`, always accepted.
pub struct RandomSwapAgent {
    rng: SeededRng,
}

impl RandomSwapAgent {
    pub fn new(seed: u64) -> Self {
        RandomSwapAgent {
            rng: rng::seeded(seed),
        }
    }
}

impl SwapAgent for RandomSwapAgent {
    fn name(&self) -> &str {
        "random-swap"
    }

    fn begin_restart(&mut self, seed: u64) {
        self.rng = rng::seeded(seed);
    }

    fn act(&mut self, ctx: &SwapContext<'_>) -> Result<Action, SwapError> {
        let sol = ctx.solution;
        let n = ctx.instance.n();
        let p = sol.p();
        if p == n {
            return Ok(Action::Stop);
        }
        let remove = sol.facilities()[self.rng.random_range(0..p)];
        let k = self.rng.random_range(0..n - p);
        let insert = (0..n)
            .filter(|&i| !sol.is_facility(i))
            .nth(k)
            .expect("n - p candidates exist");
        Ok(Action::Swap { remove, insert })
    }

    fn update_criterion(&self, _: f64, _: &SwapContext<'_>) -> bool {
        true
    }
}

/// Best pair over all of `F x (V \ F)`; only improving swaps are accepted.
#[derive(Debug, Default)]
pub struct GreedySwapAgent;

impl GreedySwapAgent {
    pub fn new() -> Self {
        GreedySwapAgent
    }

    /// Minimum-delta pair, ties to the lower `remove` then lower `insert` id.
    pub fn best_pair(ctx: &SwapContext<'_>) -> Option<(usize, usize, f64)> {
        let sol = ctx.solution;
        let n = ctx.instance.n();
        let mut best: Option<(usize, usize, f64)> = None;
        let tie = super::IMPROVE_TOL * sol.objective().abs();
        for &remove in sol.facilities() {
            for insert in (0..n).filter(|&i| !sol.is_facility(i)) {
                let delta = sol.swap_delta_unchecked(ctx.instance, remove, insert);
                if best.is_none_or(|(_, _, d)| delta < d - tie) {
                    best = Some((remove, insert, delta));
                }
            }
        }
        best
    }
}

impl SwapAgent for GreedySwapAgent {
    fn name(&self) -> &str {
        "greedy-swap"
    }

    fn act(&mut self, ctx: &SwapContext<'_>) -> Result<Action, SwapError> {
        Ok(match Self::best_pair(ctx) {
            Some((remove, insert, _)) => Action::Swap { remove, insert },
            None => Action::Stop,
        })
    }

    fn update_criterion(&self, delta: f64, ctx: &SwapContext<'_>) -> bool {
        is_improvement(delta, ctx.solution.objective())
    }
}

/// Voronoi-based swap with cost awareness: close the facility of the
/// cheapest cell and open the best node inside the most expensive cell.
#[derive(Debug, Default)]
pub struct VscaAgent;

impl VscaAgent {
    pub fn new() -> Self {
        VscaAgent
    }
}

impl SwapAgent for VscaAgent {
    fn name(&self) -> &str {
        "vsca"
    }

    fn act(&mut self, ctx: &SwapContext<'_>) -> Result<Action, SwapError> {
        let sol = ctx.solution;
        if sol.p() < 2 {
            return Ok(Action::Stop);
        }
        let costs = cell_costs(ctx.instance, sol);
        // Cells are in ascending facility order, so the first extreme found
        // is the one with the lower facility id.
        let mut high = 0;
        let mut low = 0;
        for (r, &c) in costs.iter().enumerate() {
            if c > costs[high] {
                high = r;
            }
            if c < costs[low] {
                low = r;
            }
        }
        let remove = sol.facilities()[low];
        let high_facility = sol.facilities()[high];
        let mut best: Option<(usize, f64)> = None;
        for (j, a) in sol.nearest().iter().enumerate() {
            if a.facility != high_facility || sol.is_facility(j) {
                continue;
            }
            let delta = sol.swap_delta_unchecked(ctx.instance, remove, j);
            if best.is_none_or(|(_, d)| delta < d) {
                best = Some((j, delta));
            }
        }
        Ok(match best {
            Some((insert, _)) => Action::Swap { remove, insert },
            None => Action::Stop,
        })
    }

    fn update_criterion(&self, delta: f64, ctx: &SwapContext<'_>) -> bool {
        is_improvement(delta, ctx.solution.objective())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::path4;
    use crate::instance::{Graph, Instance, InstanceMeta, Point, Solution};
    use crate::swap::swap_relocate;

    fn ctx<'a>(inst: &'a Instance, sol: &'a Solution, base: &'a [usize]) -> SwapContext<'a> {
        SwapContext {
            instance: inst,
            solution: sol,
            base_facilities: base,
            base_objective: sol.objective(),
            step: 0,
            budget: 1,
        }
    }

    #[test]
    fn random_single_pair() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        let inst = Instance::new(
            Graph::euclidean(pts, &[(0, 1)]).unwrap(),
            vec![1.0, 1.0],
            InstanceMeta::default(),
        )
        .unwrap();
        let sol = Solution::new(&inst, &[0]).unwrap();
        let mut agent = RandomSwapAgent::new(3);
        for _ in 0..20 {
            assert_eq!(
                agent.act(&ctx(&inst, &sol, &[0])).unwrap(),
                Action::Swap {
                    remove: 0,
                    insert: 1
                }
            );
        }
    }

    #[test]
    fn random_is_uniform_over_pairs() {
        // n = 10, p = 3: 21 pairs, 10000 draws. Expected count 476.19,
        // chi-square with 20 degrees of freedom; 99.9% quantile is 45.31.
        let pts = (0..10).map(|i| Point::new(i as f64, 0.0)).collect();
        let pairs: Vec<_> = (0..9).map(|i| (i, i + 1)).collect();
        let inst = Instance::new(
            Graph::euclidean(pts, &pairs).unwrap(),
            vec![1.0; 10],
            InstanceMeta::default(),
        )
        .unwrap();
        let sol = Solution::new(&inst, &[2, 5, 7]).unwrap();
        let mut agent = RandomSwapAgent::new(11);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..10_000 {
            if let Action::Swap { remove, insert } =
                agent.act(&ctx(&inst, &sol, &[2, 5, 7])).unwrap()
            {
                assert!(sol.is_facility(remove) && !sol.is_facility(insert));
                *counts.entry((remove, insert)).or_insert(0usize) += 1;
            }
        }
        assert_eq!(counts.len(), 21);
        let e = 10_000.0 / 21.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        assert!(chi2 < 45.31, "chi-square {chi2}");
    }

    #[test]
    fn random_is_deterministic() {
        let inst = path4(vec![1.0; 4]);
        let sol = Solution::new(&inst, &[0, 2]).unwrap();
        let draw = |seed| {
            let mut a = RandomSwapAgent::new(seed);
            (0..10)
                .map(|_| a.act(&ctx(&inst, &sol, &[0, 2])).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
    }

    #[test]
    fn greedy_path_example() {
        let inst = path4(vec![1.0; 4]);
        let sol = Solution::new(&inst, &[0]).unwrap();
        assert_eq!(
            GreedySwapAgent::best_pair(&ctx(&inst, &sol, &[0])),
            Some((0, 1, -2.0))
        );
        let plan = swap_relocate(&inst, &[0], 1, &mut GreedySwapAgent, 5, 0).unwrap();
        assert_eq!(plan.removed, vec![0]);
        assert_eq!(plan.inserted, vec![1]);
        assert!((plan.improvement_ratio - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_stops_at_local_optimum() {
        let inst = path4(vec![1.0; 4]);
        let plan = swap_relocate(&inst, &[1], 1, &mut GreedySwapAgent, 1, 0).unwrap();
        assert_eq!(plan.improvement_ratio, 0.0);
        assert_eq!(plan.log.len(), 1);
        assert!(!plan.log[0].accepted);
    }

    #[test]
    fn vsca_single_facility_stops() {
        let inst = path4(vec![1.0; 4]);
        let plan = swap_relocate(&inst, &[0], 1, &mut VscaAgent, 1, 0).unwrap();
        assert_eq!(plan.log[0].swap, None);
        assert_eq!(plan.improvement_ratio, 0.0);
    }

    #[test]
    fn vsca_moves_idle_facility_into_overloaded_cell() {
        // Left cluster 0..3 carries all demand; node 6 on the far right has
        // none. Facilities {0, 6}: the right cell costs 0, the left is loaded.
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(6.0, 0.0),
            Point::new(8.0, 0.0),
            Point::new(10.0, 0.0),
        ];
        let pairs: Vec<_> = (0..6).map(|i| (i, i + 1)).collect();
        let demand = vec![5.0, 5.0, 5.0, 5.0, 0.0, 0.0, 0.0];
        let inst = Instance::new(
            Graph::euclidean(pts, &pairs).unwrap(),
            demand,
            InstanceMeta::default(),
        )
        .unwrap();
        let sol = Solution::new(&inst, &[0, 6]).unwrap();
        let c = ctx(&inst, &sol, &[0, 6]);
        let action = VscaAgent.act(&c).unwrap();
        let Action::Swap { remove, insert } = action else {
            panic!("expected swap")
        };
        assert_eq!(remove, 6);
        assert!(sol.nearest()[insert].facility == 0);
        let delta = sol.swap_delta(&inst, remove, insert).unwrap();
        assert!(delta < 0.0);
        // Exhaustive scan inside the loaded cell agrees.
        let best = (1..4)
            .map(|j| sol.swap_delta(&inst, 6, j).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(delta, best);
    }
}
