use super::GenError;
use crate::instance::Graph;

const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;

/// Principal eigenvector of the adjacency matrix, scaled to a maximum of 1.
///
/// Iterates `x <- (A + I) x`, which has the same eigenvectors as `A` but a
/// strictly dominant eigenvalue on connected bipartite graphs too.
pub fn eigenvector_centrality(graph: &Graph) -> Result<Vec<f64>, GenError> {
    let n = graph.len();
    let mut x = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        for (u, slot) in next.iter_mut().enumerate() {
            *slot = x[u] + graph.neighbors(u).iter().map(|&(v, _)| x[v]).sum::<f64>();
        }
        let max = next.iter().cloned().fold(0.0, f64::max);
        for v in &mut next {
            *v /= max;
        }
        residual = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if residual < TOLERANCE {
            return Ok(x);
        }
    }
    Err(GenError::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Point;

    fn graph(n: usize, pairs: &[(usize, usize)]) -> Graph {
        let pts = (0..n)
            .map(|i| Point::new(i as f64, (i * i) as f64))
            .collect();
        Graph::euclidean(pts, pairs).unwrap()
    }

    #[test]
    fn complete_graph_is_uniform() {
        let g = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let c = eigenvector_centrality(&g).unwrap();
        assert!(c.iter().all(|&v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn star_center_dominates() {
        let g = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let c = eigenvector_centrality(&g).unwrap();
        assert!(c[1..].iter().all(|&leaf| c[0] > leaf));
    }

    #[test]
    fn path_three_center_is_sqrt_two() {
        // Adjacency of P3 has eigenvector (1, sqrt 2, 1) for eigenvalue sqrt 2.
        let g = graph(3, &[(0, 1), (1, 2)]);
        let c = eigenvector_centrality(&g).unwrap();
        assert!((c[1] / c[0] - std::f64::consts::SQRT_2).abs() < 1e-8);
        assert!((c[0] - c[2]).abs() < 1e-12);
    }
}
