//! The swap framework for facility relocation and its agents.
//!
//! Each restart starts from `F0` and lets the agent propose up to `k`
//! `(remove, insert)` pairs. Every proposal consumes one step. An accepted
//! proposal is applied; a rejected one ends the restart. The best facility
//! set seen after any accepted swap (or `F0` itself) is reported, with the
//! relocation recorded as the net sets `R = F0 \ F` and `I = F \ F0`.

mod agents;
mod policy;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{improvement_ratio, objective, Instance, InstanceError, Solution};
use crate::rng;

pub use agents::{GreedySwapAgent, RandomSwapAgent, VscaAgent};
pub use policy::{parse_endpoint, PolicyAgent, DEFAULT_TIMEOUT};

/// Default number of restarts.
pub const DEFAULT_TRIALS: usize = 5;

/// Swaps must lower the objective by more than this fraction to count as
/// improving.
pub const IMPROVE_TOL: f64 = 1e-12;

pub fn is_improvement(delta: f64, current: f64) -> bool {
    delta < -IMPROVE_TOL * current.abs()
}

#[derive(Debug, Error)]
pub enum SwapError {
    #[error("relocation budget k = {k} must be in 1..={p}")]
    InvalidBudget { k: usize, p: usize },
    #[error("number of restarts must be at least 1")]
    InvalidTrials,
    #[error("agent {agent} proposed invalid swap ({remove}, {insert}): {reason}")]
    InvalidAction {
        agent: String,
        remove: usize,
        insert: usize,
        reason: String,
    },
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("cannot reach policy server at {endpoint}: {source}; start one (e.g. the trainer's policy server) or pass --endpoint")]
    Connect {
        endpoint: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// What an agent wants to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Swap {
        remove: usize,
        insert: usize,
    },
    /// No valid or useful move; ends the restart.
    Stop,
}

/// State handed to an agent at each step.
pub struct SwapContext<'a> {
    pub instance: &'a Instance,
    pub solution: &'a Solution,
    pub base_facilities: &'a [usize],
    pub base_objective: f64,
    pub step: usize,
    pub budget: usize,
}

impl SwapContext<'_> {
    pub fn current_q(&self) -> f64 {
        improvement_ratio(self.base_objective, self.solution.objective())
    }
}

/// A policy choosing `(facility to remove, node to insert)` pairs.
pub trait SwapAgent {
    fn name(&self) -> &str;

    /// Called before every restart with a restart-specific seed.
    fn begin_restart(&mut self, _seed: u64) {}

    fn act(&mut self, ctx: &SwapContext<'_>) -> Result<Action, SwapError>;

    /// Whether a proposal with objective change `delta` is applied.
    fn update_criterion(&self, delta: f64, ctx: &SwapContext<'_>) -> bool;
}

impl<A: SwapAgent + ?Sized> SwapAgent for Box<A> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn begin_restart(&mut self, seed: u64) {
        (**self).begin_restart(seed)
    }
    fn act(&mut self, ctx: &SwapContext<'_>) -> Result<Action, SwapError> {
        (**self).act(ctx)
    }
    fn update_criterion(&self, delta: f64, ctx: &SwapContext<'_>) -> bool {
        (**self).update_criterion(delta, ctx)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub restart: usize,
    pub step: usize,
    /// `None` when the agent stopped.
    pub swap: Option<(usize, usize)>,
    pub delta: f64,
    pub accepted: bool,
    /// Objective after this step.
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelocationPlan {
    pub method: String,
    pub base_facilities: Vec<usize>,
    pub base_objective: f64,
    /// `R`: facilities of `F0` closed by the plan.
    pub removed: Vec<usize>,
    /// `I`: nodes opened by the plan.
    pub inserted: Vec<usize>,
    pub facilities: Vec<usize>,
    pub final_objective: f64,
    pub improvement_ratio: f64,
    pub budget: usize,
    pub trials: usize,
    pub log: Vec<StepRecord>,
}

impl RelocationPlan {
    /// Recomputes the objective and ratio from the sets and checks the
    /// bookkeeping invariants.
    pub fn verify(&self, instance: &Instance) -> Result<(), String> {
        let f0: Vec<usize> = self.base_facilities.clone();
        if self.removed.len() != self.inserted.len() {
            return Err("removed and inserted sets differ in size".into());
        }
        if self.removed.len() > self.budget {
            return Err(format!(
                "{} relocations exceed the budget {}",
                self.removed.len(),
                self.budget
            ));
        }
        if !self.removed.iter().all(|r| f0.contains(r)) {
            return Err("removed set is not a subset of F0".into());
        }
        if self.inserted.iter().any(|i| f0.contains(i)) {
            return Err("inserted set intersects F0".into());
        }
        let mut rebuilt: Vec<usize> = f0
            .iter()
            .copied()
            .filter(|f| !self.removed.contains(f))
            .collect();
        rebuilt.extend(&self.inserted);
        rebuilt.sort_unstable();
        if rebuilt != self.facilities {
            return Err("F0 with I added and R removed does not match the final set".into());
        }
        let base = objective(instance, &f0).map_err(|e| e.to_string())?;
        let fin = objective(instance, &self.facilities).map_err(|e| e.to_string())?;
        let q = improvement_ratio(base, fin);
        if !crate::approx_eq(fin, self.final_objective) || (q - self.improvement_ratio).abs() > 1e-9
        {
            return Err(format!(
                "stored Q {} vs recomputed {q}",
                self.improvement_ratio
            ));
        }
        Ok(())
    }
}

fn net_sets(base: &[usize], current: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let removed = base
        .iter()
        .copied()
        .filter(|f| current.binary_search(f).is_err())
        .collect();
    let inserted = current
        .iter()
        .copied()
        .filter(|f| base.binary_search(f).is_err())
        .collect();
    (removed, inserted)
}

/// Relocates at most `k` facilities of `f0` with `agent`, best of `trials`
/// restarts.
pub fn swap_relocate<A: SwapAgent + ?Sized>(
    instance: &Instance,
    f0: &[usize],
    k: usize,
    agent: &mut A,
    trials: usize,
    seed: u64,
) -> Result<RelocationPlan, SwapError> {
    let p = instance.validate_facilities(f0)?.len();
    if k == 0 || k > p {
        return Err(SwapError::InvalidBudget { k, p });
    }
    run_swaps(instance, f0, k, agent, trials, seed)
}

/// The framework loop without the `k <= |F0|` restriction (the p-median
/// driver uses it with an arbitrary swap count).
pub fn run_swaps<A: SwapAgent + ?Sized>(
    instance: &Instance,
    f0: &[usize],
    steps: usize,
    agent: &mut A,
    trials: usize,
    seed: u64,
) -> Result<RelocationPlan, SwapError> {
    if trials == 0 {
        return Err(SwapError::InvalidTrials);
    }
    let start = Solution::new(instance, f0)?;
    let base: Vec<usize> = start.facilities().to_vec();
    let base_objective = start.objective();
    let mut best_objective = base_objective;
    let mut best_set = base.clone();
    let mut log = Vec::new();

    for restart in 0..trials {
        agent.begin_restart(rng::derive_seed(seed, restart as u64));
        let mut sol = start.clone();
        for step in 0..steps {
            let ctx = SwapContext {
                instance,
                solution: &sol,
                base_facilities: &base,
                base_objective,
                step,
                budget: steps,
            };
            let (remove, insert) = match agent.act(&ctx)? {
                Action::Stop => {
                    log.push(StepRecord {
                        restart,
                        step,
                        swap: None,
                        delta: 0.0,
                        accepted: false,
                        objective: sol.objective(),
                    });
                    break;
                }
                Action::Swap { remove, insert } => (remove, insert),
            };
            let delta =
                sol.swap_delta(instance, remove, insert)
                    .map_err(|e| SwapError::InvalidAction {
                        agent: agent.name().to_string(),
                        remove,
                        insert,
                        reason: e.to_string(),
                    })?;
            let accepted = agent.update_criterion(delta, &ctx);
            if accepted {
                sol.apply_swap(instance, remove, insert)?;
            }
            log.push(StepRecord {
                restart,
                step,
                swap: Some((remove, insert)),
                delta,
                accepted,
                objective: sol.objective(),
            });
            if !accepted {
                break;
            }
            if sol.objective() < best_objective {
                best_objective = sol.objective();
                best_set = sol.facilities().to_vec();
            }
        }
    }

    let (removed, inserted) = net_sets(&base, &best_set);
    Ok(RelocationPlan {
        method: agent.name().to_string(),
        base_facilities: base,
        base_objective,
        removed,
        inserted,
        facilities: best_set,
        final_objective: best_objective,
        improvement_ratio: improvement_ratio(base_objective, best_objective),
        budget: steps,
        trials,
        log,
    })
}
