use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{observe, EnvError, Observation};
use crate::instance::{improvement_ratio, Instance, Solution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoggedStep {
    pub u1: usize,
    pub u2: usize,
    pub reward: f64,
}

/// One relocation episode: `k` unconditional swaps starting from `F0`.
///
/// The reward of a step is the change in improvement ratio, so the rewards
/// of any prefix sum to the ratio reached so far.
#[derive(Debug, Clone)]
pub struct Episode {
    instance: Arc<Instance>,
    base: Vec<usize>,
    base_objective: f64,
    solution: Solution,
    budget: usize,
    step_index: usize,
    log: Vec<LoggedStep>,
    seed: u64,
}

impl Episode {
    pub fn reset(
        instance: Arc<Instance>,
        f0: &[usize],
        k: usize,
        seed: u64,
    ) -> Result<(Self, Observation), EnvError> {
        let solution = Solution::new(&instance, f0)?;
        let p = solution.p();
        if k == 0 || k > p {
            return Err(EnvError::InvalidBudget { k, p });
        }
        let episode = Episode {
            base: solution.facilities().to_vec(),
            base_objective: solution.objective(),
            instance,
            solution,
            budget: k,
            step_index: 0,
            log: Vec::new(),
            seed,
        };
        let obs = episode.observation();
        Ok((episode, obs))
    }

    pub fn observation(&self) -> Observation {
        observe(
            &self.instance,
            &self.solution,
            self.step_index,
            self.budget,
            self.current_q(),
        )
    }

    pub fn instance(&self) -> &Arc<Instance> {
        &self.instance
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    pub fn base_facilities(&self) -> &[usize] {
        &self.base
    }

    pub fn base_objective(&self) -> f64 {
        self.base_objective
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn log(&self) -> &[LoggedStep] {
        &self.log
    }

    pub fn done(&self) -> bool {
        self.step_index >= self.budget
    }

    pub fn current_q(&self) -> f64 {
        improvement_ratio(self.base_objective, self.solution.objective())
    }

    /// Net relocation sets `(F0 \ F, F \ F0)`.
    pub fn relocation(&self) -> (Vec<usize>, Vec<usize>) {
        let cur = self.solution.facilities();
        let removed = self
            .base
            .iter()
            .copied()
            .filter(|f| cur.binary_search(f).is_err())
            .collect();
        let inserted = cur
            .iter()
            .copied()
            .filter(|f| self.base.binary_search(f).is_err())
            .collect();
        (removed, inserted)
    }

    fn check_action(&self, u1: usize, u2: usize) -> Result<(), EnvError> {
        let n = self.instance.n();
        if u1 >= n {
            return Err(EnvError::Mask {
                node: u1,
                reason: format!("u1 out of range (n = {n})"),
            });
        }
        if u2 >= n {
            return Err(EnvError::Mask {
                node: u2,
                reason: format!("u2 out of range (n = {n})"),
            });
        }
        if !self.solution.is_facility(u1) {
            return Err(EnvError::Mask {
                node: u1,
                reason: "u1 is not a facility".into(),
            });
        }
        if self.solution.is_facility(u2) {
            return Err(EnvError::Mask {
                node: u2,
                reason: "u2 is already a facility".into(),
            });
        }
        Ok(())
    }

    /// Applies the swap unconditionally.
    pub fn step(&mut self, u1: usize, u2: usize) -> Result<StepResult, EnvError> {
        if self.done() {
            return Err(EnvError::EpisodeDone);
        }
        self.check_action(u1, u2)?;
        let before = self.current_q();
        self.solution.apply_swap(&self.instance, u1, u2)?;
        let reward = self.current_q() - before;
        self.step_index += 1;
        self.log.push(LoggedStep { u1, u2, reward });
        Ok(StepResult {
            observation: self.observation(),
            reward,
            done: self.done(),
        })
    }
}
