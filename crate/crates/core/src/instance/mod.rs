//! Problem representation: graphs with demand, shortest-path distances, the
//! p-median objective, Voronoi cells, LP export and the exhaustive oracle.

mod cells;
mod distance;
mod exact;
mod geometry;
mod graph;
mod ilp;
pub mod io;
mod solution;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cells::{cell_costs, cell_stats, Cell, CellStats};
pub use distance::{build_distance_matrix, DistanceMatrix};
pub use exact::{exact_solve, exact_solve_with, ExactConfig, ExactSolution, DEFAULT_EXACT_CAP};
pub use geometry::{voronoi_areas, Polygon};
pub use graph::{Edge, Graph, Point};
pub use ilp::{export_ilp, write_ilp};
pub use solution::{Assignment, Solution};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("graph has no nodes")]
    Empty,
    #[error("node {0} has a non-finite coordinate")]
    InvalidCoordinate(usize),
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("edge ({u}, {v}) has invalid length {length}")]
    InvalidLength { u: usize, v: usize, length: f64 },
    #[error("graph is disconnected: node {to} is unreachable from node {from}")]
    Disconnected { from: usize, to: usize },
    #[error("demand vector has {got} entries, expected {expected}")]
    DemandLength { got: usize, expected: usize },
    #[error("demand at node {node} is invalid ({value})")]
    InvalidDemand { node: usize, value: f64 },
    #[error("total demand is zero")]
    ZeroDemand,
    #[error("facility set is empty")]
    EmptyFacilities,
    #[error("facility {0} listed more than once")]
    DuplicateFacility(usize),
    #[error("node {0} is not a facility")]
    NotAFacility(usize),
    #[error("node {0} is already a facility")]
    AlreadyFacility(usize),
    #[error("p = {p} out of range 1..={n}")]
    InvalidP { p: usize, n: usize },
    #[error("C({n}, {p}) = {count} candidate sets exceeds the cap of {cap}; export the model with `export-ilp` and use an external solver")]
    CombinationCap {
        n: usize,
        p: usize,
        count: f64,
        cap: u64,
    },
    #[error("instance file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Generator provenance stored alongside an instance.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub generator: String,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
}

/// A graph with per-node demand and its shortest-path distance matrix.
///
/// Immutable after construction; share it across threads behind an `Arc`.
#[derive(Debug, Clone)]
pub struct Instance {
    graph: Graph,
    demand: Vec<f64>,
    dist: DistanceMatrix,
    meta: InstanceMeta,
}

pub type SharedInstance = Arc<Instance>;

impl Instance {
    pub fn new(graph: Graph, demand: Vec<f64>, meta: InstanceMeta) -> Result<Self, InstanceError> {
        let n = graph.len();
        if demand.len() != n {
            return Err(InstanceError::DemandLength {
                got: demand.len(),
                expected: n,
            });
        }
        for (node, &value) in demand.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(InstanceError::InvalidDemand { node, value });
            }
        }
        if !demand.iter().any(|&d| d > 0.0) {
            return Err(InstanceError::ZeroDemand);
        }
        let dist = build_distance_matrix(&graph)?;
        Ok(Instance {
            graph,
            demand,
            dist,
            meta,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn dist(&self) -> &DistanceMatrix {
        &self.dist
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist.get(i, j)
    }

    pub fn meta(&self) -> &InstanceMeta {
        &self.meta
    }

    pub fn total_demand(&self) -> f64 {
        self.demand.iter().sum()
    }

    /// Checks ids and distinctness and returns the facilities sorted.
    pub fn validate_facilities(&self, facilities: &[usize]) -> Result<Vec<usize>, InstanceError> {
        let n = self.n();
        if facilities.is_empty() {
            return Err(InstanceError::EmptyFacilities);
        }
        let mut sorted = facilities.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(InstanceError::DuplicateFacility(w[0]));
            }
        }
        if let Some(&bad) = sorted.iter().find(|&&f| f >= n) {
            return Err(InstanceError::NodeOutOfRange { node: bad, n });
        }
        Ok(sorted)
    }
}

/// Demand-weighted sum of distances from every node to its nearest facility.
pub fn objective(instance: &Instance, facilities: &[usize]) -> Result<f64, InstanceError> {
    if facilities.is_empty() {
        return Err(InstanceError::EmptyFacilities);
    }
    let n = instance.n();
    if let Some(&bad) = facilities.iter().find(|&&f| f >= n) {
        return Err(InstanceError::NodeOutOfRange { node: bad, n });
    }
    Ok(objective_unchecked(instance, facilities))
}

pub(crate) fn objective_unchecked(instance: &Instance, facilities: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, &w) in instance.demand.iter().enumerate() {
        let row = instance.dist.row(i);
        let best = facilities
            .iter()
            .map(|&f| row[f])
            .fold(f64::INFINITY, f64::min);
        total += w * best;
    }
    total
}

/// Improvement ratio `(base - current) / base`, zero when the base cost is zero.
pub fn improvement_ratio(base: f64, current: f64) -> f64 {
    if base > 0.0 {
        (base - current) / base
    } else {
        0.0
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Path 0-1-2-3 with unit edges.
    pub fn path4(demand: Vec<f64>) -> Instance {
        let pts = (0..4).map(|i| Point::new(i as f64, 0.0)).collect();
        let g = Graph::euclidean(pts, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        Instance::new(g, demand, InstanceMeta::default()).unwrap()
    }
}
