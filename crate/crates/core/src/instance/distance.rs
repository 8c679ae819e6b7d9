use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::{Graph, InstanceError};

/// Dense symmetric all-pairs shortest-path matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(graph: &Graph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(State {
        cost: 0.0,
        node: source,
    });
    while let Some(State { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for &(next, len) in graph.neighbors(node) {
            let cand = cost + len;
            if cand < dist[next] {
                dist[next] = cand;
                heap.push(State {
                    cost: cand,
                    node: next,
                });
            }
        }
    }
    dist
}

/// All-pairs shortest paths by one Dijkstra run per source (parallel over
/// sources). The result is symmetrised by taking the elementwise minimum so
/// that floating-point path-order effects cannot break symmetry.
pub fn build_distance_matrix(graph: &Graph) -> Result<DistanceMatrix, InstanceError> {
    let n = graph.len();
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| dijkstra(graph, s)).collect();
    if let Some(j) = rows[0].iter().position(|d| !d.is_finite()) {
        return Err(InstanceError::Disconnected { from: 0, to: j });
    }
    let mut data = Vec::with_capacity(n * n);
    for row in &rows {
        data.extend_from_slice(row);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = data[i * n + j].min(data[j * n + i]);
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Point;

    fn line(n: usize) -> Vec<Point> {
        (0..n).map(|i| Point::new(i as f64, 0.0)).collect()
    }

    #[test]
    fn path_composition() {
        let g = Graph::euclidean(line(3), &[(0, 1), (1, 2)]).unwrap();
        let d = build_distance_matrix(&g).unwrap();
        assert_eq!(d.get(0, 2), 2.0);
        assert_eq!(d.get(2, 0), 2.0);
    }

    #[test]
    fn single_node() {
        let g = Graph::new(vec![Point::new(0.0, 0.0)], vec![]).unwrap();
        let d = build_distance_matrix(&g).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn four_cycle_matches_enumerated_paths() {
        // Square 0-1-2-3-0 with unit sides. Hand enumeration of simple paths:
        // 0->2 is 0-1-2 or 0-3-2 (both 2); 1->3 likewise; adjacent pairs 1.
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let g = Graph::euclidean(pts, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let d = build_distance_matrix(&g).unwrap();
        let expected = [
            [0.0, 1.0, 2.0, 1.0],
            [1.0, 0.0, 1.0, 2.0],
            [2.0, 1.0, 0.0, 1.0],
            [1.0, 2.0, 1.0, 0.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(d.get(i, j), expected[i][j]);
            }
        }
    }

    #[test]
    fn disconnected_names_pair() {
        let g = Graph::euclidean(line(3), &[(0, 1)]).unwrap();
        match build_distance_matrix(&g) {
            Err(InstanceError::Disconnected { from, to }) => assert_eq!((from, to), (0, 2)),
            other => panic!("expected disconnected error, got {other:?}"),
        }
    }
}
