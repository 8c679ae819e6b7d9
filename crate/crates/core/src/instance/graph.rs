use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::InstanceError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// Undirected graph with planar node coordinates.
///
/// Node ids are the indices into `nodes`. Construction checks for self-loops,
/// duplicate edges and non-positive lengths; connectivity is checked when the
/// distance matrix is built.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    nodes: Vec<Point>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    pub fn new(nodes: Vec<Point>, edges: Vec<Edge>) -> Result<Self, InstanceError> {
        let n = nodes.len();
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        for (i, p) in nodes.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(InstanceError::InvalidCoordinate(i));
            }
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(InstanceError::NodeOutOfRange {
                    node: e.u.max(e.v),
                    n,
                });
            }
            if e.u == e.v {
                return Err(InstanceError::SelfLoop(e.u));
            }
            if !(e.length > 0.0) || !e.length.is_finite() {
                return Err(InstanceError::InvalidLength {
                    u: e.u,
                    v: e.v,
                    length: e.length,
                });
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(InstanceError::DuplicateEdge { u: e.u, v: e.v });
            }
            adjacency[e.u].push((e.v, e.length));
            adjacency[e.v].push((e.u, e.length));
        }
        Ok(Graph {
            nodes,
            edges,
            adjacency,
        })
    }

    /// Builds a graph whose edge lengths are the Euclidean distances between
    /// the endpoints.
    pub fn euclidean(nodes: Vec<Point>, pairs: &[(usize, usize)]) -> Result<Self, InstanceError> {
        let edges = pairs
            .iter()
            .map(|&(u, v)| {
                let length = match (nodes.get(u), nodes.get(v)) {
                    (Some(a), Some(b)) => a.dist(b),
                    _ => f64::NAN,
                };
                Edge { u, v, length }
            })
            .collect();
        Graph::new(nodes, edges)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    /// Connected component label per node, labels assigned in order of the
    /// lowest node id of each component.
    pub fn components(&self) -> Vec<usize> {
        let n = self.len();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adjacency[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Axis-aligned bounding box `(min, max)` of the node coordinates.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.nodes {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }
}
