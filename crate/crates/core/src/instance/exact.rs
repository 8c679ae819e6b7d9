//! Exhaustive p-median oracle for small instances.
//!
//! Candidate sets are enumerated in lexicographic order by depth-first search.
//! Subtrees whose lower bound (every node served by the better of its current
//! nearest chosen facility and the closest still-selectable node) cannot beat
//! the incumbent are skipped, which keeps the search exact while making
//! instances like n = 64, p = 6 tractable.

use serde::Serialize;

use super::{Instance, InstanceError};

/// Ties within this relative margin keep the lexicographically earlier set.
const TIE_TOL: f64 = 1e-12;

/// Default limit on the number of candidate sets.
pub const DEFAULT_EXACT_CAP: u64 = 2_000_000;

#[derive(Debug, Clone, Copy)]
pub struct ExactConfig {
    /// Refuse instances with more than this many candidate sets.
    pub max_combinations: u64,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            max_combinations: DEFAULT_EXACT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSolution {
    pub facilities: Vec<usize>,
    pub objective: f64,
    /// Search nodes visited (for diagnostics).
    pub visited: u64,
}

/// `C(n, k)` in floating point (exact for the magnitudes compared against
/// the cap).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

pub fn exact_solve(instance: &Instance, p: usize) -> Result<ExactSolution, InstanceError> {
    exact_solve_with(instance, p, &ExactConfig::default())
}

struct Search<'a> {
    instance: &'a Instance,
    n: usize,
    p: usize,
    /// `suffix_min[j * n + i] = min_{j' >= j} d(i, j')`.
    suffix_min: Vec<f64>,
    /// Per-depth current nearest distance, `(p + 1) * n`.
    cur: Vec<f64>,
    chosen: Vec<usize>,
    best: Option<Vec<usize>>,
    threshold: f64,
    best_value: f64,
    visited: u64,
}

impl Search<'_> {
    fn weighted(&self, dists: impl Iterator<Item = f64>) -> f64 {
        self.instance
            .demand()
            .iter()
            .zip(dists)
            .map(|(w, d)| w * d)
            .sum()
    }

    fn dfs(&mut self, depth: usize, start: usize) {
        let n = self.n;
        let remaining = self.p - depth;
        for j in start..=(n - remaining) {
            self.visited += 1;
            let (head, tail) = self.cur.split_at_mut((depth + 1) * n);
            let prev = &head[depth * n..];
            let next = &mut tail[..n];
            let row = self.instance.dist().row(j);
            for i in 0..n {
                next[i] = prev[i].min(row[i]);
            }
            self.chosen.push(j);
            if remaining == 1 {
                let value =
                    self.weighted(self.cur[(depth + 1) * n..(depth + 2) * n].iter().copied());
                if value < self.threshold {
                    self.best_value = value;
                    self.threshold = value - TIE_TOL * value.abs();
                    self.best = Some(self.chosen.clone());
                }
            } else {
                let suffix = &self.suffix_min[(j + 1) * n..(j + 2) * n];
                let cur = &self.cur[(depth + 1) * n..(depth + 2) * n];
                let bound = self.weighted(cur.iter().zip(suffix).map(|(a, b)| a.min(*b)));
                if bound < self.threshold {
                    self.dfs(depth + 1, j + 1);
                }
            }
            self.chosen.pop();
        }
    }
}

/// Greedy-addition value used as the initial pruning threshold.
fn greedy_value(instance: &Instance, p: usize) -> f64 {
    let n = instance.n();
    let mut cur = vec![f64::INFINITY; n];
    let mut open = vec![false; n];
    let mut value = f64::INFINITY;
    for _ in 0..p {
        let mut best = (f64::INFINITY, usize::MAX);
        for j in (0..n).filter(|&j| !open[j]) {
            let row = instance.dist().row(j);
            let v: f64 = instance
                .demand()
                .iter()
                .enumerate()
                .map(|(i, w)| w * cur[i].min(row[i]))
                .sum();
            if v < best.0 {
                best = (v, j);
            }
        }
        open[best.1] = true;
        let row = instance.dist().row(best.1);
        for i in 0..n {
            cur[i] = cur[i].min(row[i]);
        }
        value = best.0;
    }
    value
}

/// Global optimum by exhaustive (bounded) enumeration. Among optimal sets the
/// lexicographically smallest is returned.
pub fn exact_solve_with(
    instance: &Instance,
    p: usize,
    config: &ExactConfig,
) -> Result<ExactSolution, InstanceError> {
    let n = instance.n();
    if p == 0 || p > n {
        return Err(InstanceError::InvalidP { p, n });
    }
    let count = binomial(n, p);
    if count > config.max_combinations as f64 {
        return Err(InstanceError::CombinationCap {
            n,
            p,
            count,
            cap: config.max_combinations,
        });
    }
    let mut suffix_min = vec![f64::INFINITY; (n + 1) * n];
    for j in (0..n).rev() {
        let row = instance.dist().row(j);
        for i in 0..n {
            suffix_min[j * n + i] = suffix_min[(j + 1) * n + i].min(row[i]);
        }
    }
    let mut cur = vec![0.0; (p + 1) * n];
    cur[..n].fill(f64::INFINITY);
    let seed = greedy_value(instance, p);
    let mut search = Search {
        instance,
        n,
        p,
        suffix_min,
        cur,
        chosen: Vec::with_capacity(p),
        best: None,
        // Loose enough that a set matching the greedy value is still found.
        threshold: seed * (1.0 + 1e-9) + f64::MIN_POSITIVE,
        best_value: f64::INFINITY,
        visited: 0,
    };
    search.dfs(0, 0);
    let facilities = search.best.expect("greedy incumbent guarantees a solution");
    Ok(ExactSolution {
        facilities,
        objective: search.best_value,
        visited: search.visited,
    })
}
