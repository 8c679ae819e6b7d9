//! Node features and action masks of the relocation environment.
//!
//! Columns of each 10-wide feature row:
//!
//! | col | feature                                    | scaling              |
//! |-----|--------------------------------------------|----------------------|
//! | 0   | x coordinate                               | min-max per instance |
//! | 1   | y coordinate                               | min-max per instance |
//! | 2   | demand                                     | min-max per instance |
//! | 3   | 1 if the node is a facility                | -                    |
//! | 4   | node index                                 | `i / (n - 1)`        |
//! | 5   | index of the node's Voronoi cell           | `r / (p - 1)`        |
//! | 6   | distance to the assigned facility          | raw                  |
//! | 7   | cell demand sum (facilities only, else 0)  | raw                  |
//! | 8   | cell cost (facilities only, else 0)        | raw                  |
//! | 9   | cell polygon area (facilities only, else 0)| raw                  |

use serde::{Deserialize, Serialize};

use crate::instance::{cell_stats, CellStats, Instance, Solution};

pub const FEATURE_DIM: usize = 10;

pub mod col {
    pub const X: usize = 0;
    pub const Y: usize = 1;
    pub const DEMAND: usize = 2;
    pub const IS_FACILITY: usize = 3;
    pub const NODE_INDEX: usize = 4;
    pub const CELL_INDEX: usize = 5;
    pub const DIST_TO_FACILITY: usize = 6;
    pub const CELL_DEMAND: usize = 7;
    pub const CELL_COST: usize = 8;
    pub const CELL_AREA: usize = 9;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub node_features: Vec<[f64; FEATURE_DIM]>,
    /// `(u, v, length)`; the edge feature is the length.
    pub edges: Vec<(usize, usize, f64)>,
    /// True exactly for facilities (legal `u1`).
    pub remove_mask: Vec<bool>,
    /// True exactly for non-facilities (legal `u2`).
    pub insert_mask: Vec<bool>,
    pub step_index: usize,
    pub budget: usize,
    pub current_q: f64,
    /// Sorted facility ids.
    pub facilities: Vec<usize>,
    /// Unscaled Voronoi cell index per node (position in `facilities`).
    pub cell_index: Vec<usize>,
}

fn min_max(values: impl Iterator<Item = f64> + Clone) -> impl Fn(f64) -> f64 {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    move |v| if span > 0.0 { (v - lo) / span } else { 0.0 }
}

pub fn observe(
    instance: &Instance,
    solution: &Solution,
    step_index: usize,
    budget: usize,
    current_q: f64,
) -> Observation {
    let stats = cell_stats(instance, solution);
    observe_with(instance, solution, &stats, step_index, budget, current_q)
}

pub fn observe_with(
    instance: &Instance,
    solution: &Solution,
    stats: &CellStats,
    step_index: usize,
    budget: usize,
    current_q: f64,
) -> Observation {
    let n = instance.n();
    let p = solution.p();
    let nodes = instance.graph().nodes();
    let sx = min_max(nodes.iter().map(|q| q.x));
    let sy = min_max(nodes.iter().map(|q| q.y));
    let sd = min_max(instance.demand().iter().copied());
    let index_scale = if n > 1 { 1.0 / (n - 1) as f64 } else { 0.0 };
    let cell_scale = if p > 1 { 1.0 / (p - 1) as f64 } else { 0.0 };

    let mut node_features = Vec::with_capacity(n);
    let mut cell_index = Vec::with_capacity(n);
    for i in 0..n {
        let a = solution.nearest()[i];
        let r = solution
            .cell_index(a.facility)
            .expect("nearest facility in set");
        cell_index.push(r);
        let mut row = [0.0; FEATURE_DIM];
        row[col::X] = sx(nodes[i].x);
        row[col::Y] = sy(nodes[i].y);
        row[col::DEMAND] = sd(instance.demand()[i]);
        row[col::NODE_INDEX] = i as f64 * index_scale;
        row[col::CELL_INDEX] = r as f64 * cell_scale;
        row[col::DIST_TO_FACILITY] = a.distance;
        if let Some(own) = solution.cell_index(i) {
            let cell = &stats.cells[own];
            row[col::IS_FACILITY] = 1.0;
            row[col::CELL_DEMAND] = cell.demand_sum;
            row[col::CELL_COST] = cell.cost;
            row[col::CELL_AREA] = cell.area;
        }
        node_features.push(row);
    }
    let remove_mask = solution.facility_mask().to_vec();
    let insert_mask = remove_mask.iter().map(|m| !m).collect();
    Observation {
        node_features,
        edges: instance
            .graph()
            .edges()
            .iter()
            .map(|e| (e.u, e.v, e.length))
            .collect(),
        remove_mask,
        insert_mask,
        step_index,
        budget,
        current_q,
        facilities: solution.facilities().to_vec(),
        cell_index,
    }
}
