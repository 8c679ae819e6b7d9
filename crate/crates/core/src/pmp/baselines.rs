//! Construction heuristics used as p-median baselines.

use std::time::Instant;

use rand::Rng as _;

use super::init::check_p;
use super::{PmpError, PmpResult};
use crate::instance::{Instance, Point, Solution};
use crate::rng;

pub const KMEANS_MAX_ITER: usize = 100;
pub const KMEANS_SHIFT_TOL: f64 = 1e-6;

fn nearest_center(p: &Point, centers: &[Point]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, center) in centers.iter().enumerate() {
        let d = p.dist2(center);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// Demand-weighted k-means++ seeding followed by Lloyd iterations on the
/// node coordinates; each centroid is then snapped to its nearest unused
/// node. Distances here are Euclidean, not graph distances.
pub fn kmeans_baseline(instance: &Instance, p: usize, seed: u64) -> Result<PmpResult, PmpError> {
    check_p(instance, p)?;
    let start = Instant::now();
    let pts = instance.graph().nodes();
    let w = instance.demand();
    let n = pts.len();
    let mut rng = rng::seeded(seed);

    let mut centers: Vec<Point> = Vec::with_capacity(p);
    let mut d2 = vec![f64::INFINITY; n];
    while centers.len() < p {
        let weights: Vec<f64> = (0..n)
            .map(|i| {
                if centers.is_empty() {
                    w[i]
                } else {
                    w[i] * d2[i]
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &wi) in weights.iter().enumerate() {
                if r < wi {
                    chosen = i;
                    break;
                }
                r -= wi;
            }
            chosen
        } else {
            // Every weighted point already coincides with a center.
            rng.random_range(0..n)
        };
        let c = pts[pick];
        centers.push(c);
        for i in 0..n {
            d2[i] = d2[i].min(pts[i].dist2(&c));
        }
    }

    for _ in 0..KMEANS_MAX_ITER {
        let mut sx = vec![0.0; p];
        let mut sy = vec![0.0; p];
        let mut sw = vec![0.0; p];
        for i in 0..n {
            let c = nearest_center(&pts[i], &centers);
            sx[c] += w[i] * pts[i].x;
            sy[c] += w[i] * pts[i].y;
            sw[c] += w[i];
        }
        let mut shift: f64 = 0.0;
        for c in 0..p {
            if sw[c] > 0.0 {
                let next = Point::new(sx[c] / sw[c], sy[c] / sw[c]);
                shift = shift.max(next.dist(&centers[c]));
                centers[c] = next;
            }
        }
        if shift < KMEANS_SHIFT_TOL {
            break;
        }
    }

    let mut used = vec![false; n];
    let mut facilities = Vec::with_capacity(p);
    for c in &centers {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| pts[a].dist2(c).total_cmp(&pts[b].dist2(c)).then(a.cmp(&b)));
        let node = order
            .into_iter()
            .find(|&i| !used[i])
            .expect("p <= n leaves a free node");
        used[node] = true;
        facilities.push(node);
    }
    PmpResult::evaluate(instance, facilities, "k-means", 1, start)
}

/// Maranzana's alternating heuristic. Returns the result and the objective
/// after every round, starting with that of `f_init`.
pub fn maranzana_with_history(
    instance: &Instance,
    f_init: &[usize],
) -> Result<(PmpResult, Vec<f64>), PmpError> {
    let start = Instant::now();
    let mut sol = Solution::new(instance, f_init)?;
    let mut history = vec![sol.objective()];
    let n = instance.n();
    let max_rounds = n * sol.p();
    for _ in 0..max_rounds {
        let p = sol.p();
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); p];
        for (i, a) in sol.nearest().iter().enumerate() {
            let c = sol.cell_index(a.facility).expect("nearest is a facility");
            cells[c].push(i);
        }
        let next: Vec<usize> = cells
            .iter()
            .map(|members| one_median(instance, members))
            .collect();
        let candidate = Solution::new(instance, &next)?;
        if candidate.objective() < sol.objective() * (1.0 - super::IMPROVE_TOL) {
            sol = candidate;
            history.push(sol.objective());
        } else {
            break;
        }
    }
    let result = PmpResult::evaluate(instance, sol.facilities().to_vec(), "maranzana", 1, start)?;
    Ok((result, history))
}

pub fn maranzana(instance: &Instance, f_init: &[usize]) -> Result<PmpResult, PmpError> {
    maranzana_with_history(instance, f_init).map(|(r, _)| r)
}

/// Member of `members` minimizing the demand-weighted distance to the
/// others; ties go to the lower id (members are ascending).
fn one_median(instance: &Instance, members: &[usize]) -> usize {
    let demand = instance.demand();
    let mut best = members[0];
    let mut best_cost = f64::INFINITY;
    for &j in members {
        let row = instance.dist().row(j);
        let cost: f64 = members.iter().map(|&u| demand[u] * row[u]).sum();
        if cost < best_cost {
            best_cost = cost;
            best = j;
        }
    }
    best
}

/// Adds, `p` times, the node that lowers the objective most (ties to the
/// lower id).
pub fn greedy_addition(instance: &Instance, p: usize) -> Result<PmpResult, PmpError> {
    check_p(instance, p)?;
    let start = Instant::now();
    let n = instance.n();
    let demand = instance.demand();
    let mut current = vec![f64::INFINITY; n];
    let mut chosen = vec![false; n];
    let mut facilities = Vec::with_capacity(p);
    for _ in 0..p {
        let mut best = usize::MAX;
        let mut best_cost = f64::INFINITY;
        for j in (0..n).filter(|&j| !chosen[j]) {
            let row = instance.dist().row(j);
            let cost: f64 = (0..n).map(|i| demand[i] * current[i].min(row[i])).sum();
            if best == usize::MAX || cost < best_cost {
                best_cost = cost;
                best = j;
            }
        }
        chosen[best] = true;
        facilities.push(best);
        let row = instance.dist().row(best);
        for i in 0..n {
            current[i] = current[i].min(row[i]);
        }
    }
    PmpResult::evaluate(instance, facilities, "greedy-addition", 1, start)
}
