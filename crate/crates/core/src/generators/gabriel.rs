use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use super::{eigenvector_centrality, GenError};
use crate::instance::{Graph, Instance, InstanceMeta, Point};
use crate::rng;

/// Mean demand of the most central node.
const DEMAND_SCALE: f64 = 1000.0;
const COORD_MEAN: f64 = 0.5;
const COORD_SIGMA: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GabrielParams {
    pub n: usize,
    /// Neighbours considered per node during augmentation.
    pub knn: usize,
    /// Inclusive range of the per-node degree cap.
    pub degree_cap_range: (usize, usize),
    pub seed: u64,
}

impl Default for GabrielParams {
    fn default() -> Self {
        GabrielParams {
            n: 100,
            knn: 3,
            degree_cap_range: (3, 6),
            seed: 0,
        }
    }
}

/// Gabriel graph edges: `(u, v)` with `u < v` such that no third point lies in
/// the closed disk with diameter `uv`.
pub fn gabriel_edges(points: &[Point]) -> Vec<(usize, usize)> {
    let n = points.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let duv = points[u].dist2(&points[v]);
            let blocked = (0..n)
                .filter(|&w| w != u && w != v)
                .any(|w| points[u].dist2(&points[w]) + points[w].dist2(&points[v]) <= duv);
            if !blocked {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn component_labels(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        label[s] = next;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
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

/// Repeatedly adds the shortest Euclidean edge between two different
/// components until the graph is connected. Returns the added edges.
pub fn connect_components(
    points: &[Point],
    edges: &mut Vec<(usize, usize)>,
) -> Vec<(usize, usize)> {
    let n = points.len();
    let mut added = Vec::new();
    loop {
        let label = component_labels(n, edges);
        if label.iter().all(|&c| c == 0) {
            return added;
        }
        let mut best = (f64::INFINITY, 0, 0);
        for u in 0..n {
            for v in (u + 1)..n {
                if label[u] != label[v] {
                    let d = points[u].dist2(&points[v]);
                    if d < best.0 {
                        best = (d, u, v);
                    }
                }
            }
        }
        edges.push((best.1, best.2));
        added.push((best.1, best.2));
    }
}

fn sample_point<R: Rng>(rng: &mut R, normal: &Normal<f64>) -> Point {
    loop {
        let x = normal.sample(rng);
        let y = normal.sample(rng);
        if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
            return Point::new(x, y);
        }
    }
}

/// Random Gabriel graph on `[0, 1]^2` with k-nearest-neighbour augmentation
/// under per-node degree caps and a final connectivity repair. Demand is
/// exponential with mean proportional to eigenvector centrality, at least 1.
pub fn gen_gabriel(params: &GabrielParams) -> Result<Instance, GenError> {
    let GabrielParams {
        n,
        knn,
        degree_cap_range: (cap_lo, cap_hi),
        seed,
    } = *params;
    if n < 3 {
        return Err(GenError::InvalidParams(format!("n must be >= 3, got {n}")));
    }
    if cap_lo < 1 || cap_lo > cap_hi {
        return Err(GenError::InvalidParams(format!(
            "degree cap range ({cap_lo}, {cap_hi}) is invalid"
        )));
    }
    let mut rng = rng::seeded(seed);
    let normal = Normal::new(COORD_MEAN, COORD_SIGMA).expect("valid normal");
    let points: Vec<Point> = (0..n).map(|_| sample_point(&mut rng, &normal)).collect();

    let mut edges = gabriel_edges(&points);
    let mut present: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let mut degree = vec![0usize; n];
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let caps: Vec<usize> = (0..n)
        .map(|_| rng.random_range(cap_lo..=cap_hi).min(n - 1))
        .collect();
    for u in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&v| v != u).collect();
        order.sort_by(|&a, &b| {
            points[u]
                .dist2(&points[a])
                .total_cmp(&points[u].dist2(&points[b]))
                .then(a.cmp(&b))
        });
        for &v in order.iter().take(knn) {
            let key = (u.min(v), u.max(v));
            if present.contains(&key) || degree[u] >= caps[u] || degree[v] >= caps[v] {
                continue;
            }
            present.insert(key);
            edges.push(key);
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    connect_components(&points, &mut edges);

    let graph = Graph::euclidean(points, &edges)?;
    let centrality = eigenvector_centrality(&graph)?;
    let demand = centrality
        .iter()
        .map(|&c| {
            let mean = DEMAND_SCALE * c;
            let draw = if mean > 0.0 {
                Exp::new(1.0 / mean)
                    .expect("positive rate")
                    .sample(&mut rng)
            } else {
                0.0
            };
            draw.ceil().max(1.0)
        })
        .collect();

    let mut meta_params = BTreeMap::new();
    meta_params.insert("n".to_string(), n.to_string());
    meta_params.insert("knn".to_string(), knn.to_string());
    meta_params.insert("degree_cap_min".to_string(), cap_lo.to_string());
    meta_params.insert("degree_cap_max".to_string(), cap_hi.to_string());
    let meta = InstanceMeta {
        generator: "gabriel".into(),
        seed,
        params: meta_params,
    };
    Ok(Instance::new(graph, demand, meta)?)
}
