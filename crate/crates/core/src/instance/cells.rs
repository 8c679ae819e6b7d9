use serde::Serialize;

use super::geometry::{clip_box, voronoi_areas};
use super::{Instance, Solution};

/// Aggregates of one Voronoi cell on the graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub facility: usize,
    pub members: Vec<usize>,
    /// Total demand of the member nodes.
    pub demand_sum: f64,
    /// Demand-weighted distance from members to the facility.
    pub cost: f64,
    /// Planar area of the facility's Voronoi polygon.
    pub area: f64,
    /// Demand density `demand_sum / area`.
    pub rho: f64,
    /// Facility density `1 / area`.
    pub fac_density: f64,
}

/// One [`Cell`] per facility, in sorted facility order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStats {
    pub cells: Vec<Cell>,
}

impl CellStats {
    pub fn total_cost(&self) -> f64 {
        self.cells.iter().map(|c| c.cost).sum()
    }
}

/// Per-cell cost only, indexed like `sol.facilities()`.
pub fn cell_costs(instance: &Instance, sol: &Solution) -> Vec<f64> {
    let mut costs = vec![0.0; sol.p()];
    for (i, a) in sol.nearest().iter().enumerate() {
        let r = sol
            .cell_index(a.facility)
            .expect("nearest facility not in set");
        costs[r] += instance.demand()[i] * a.distance;
    }
    costs
}

pub fn cell_stats(instance: &Instance, sol: &Solution) -> CellStats {
    let p = sol.p();
    let mut cells: Vec<Cell> = sol
        .facilities()
        .iter()
        .map(|&facility| Cell {
            facility,
            members: Vec::new(),
            demand_sum: 0.0,
            cost: 0.0,
            area: 0.0,
            rho: 0.0,
            fac_density: 0.0,
        })
        .collect();
    for (i, a) in sol.nearest().iter().enumerate() {
        let r = sol
            .cell_index(a.facility)
            .expect("nearest facility not in set");
        let w = instance.demand()[i];
        let cell = &mut cells[r];
        cell.members.push(i);
        cell.demand_sum += w;
        cell.cost += w * a.distance;
    }
    let (lo, hi) = instance.graph().bounding_box();
    let (lo, hi) = clip_box(lo, hi);
    let sites: Vec<_> = sol
        .facilities()
        .iter()
        .map(|&f| instance.graph().nodes()[f])
        .collect();
    let areas = voronoi_areas(&sites, lo, hi);
    debug_assert_eq!(areas.len(), p);
    for (cell, area) in cells.iter_mut().zip(areas) {
        cell.area = area;
        cell.rho = cell.demand_sum / area;
        cell.fac_density = 1.0 / area;
    }
    CellStats { cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::path4;
    use crate::instance::{Graph, InstanceMeta, Point};

    #[test]
    fn every_node_its_own_facility() {
        let inst = path4(vec![1.0, 2.0, 3.0, 4.0]);
        let sol = Solution::new(&inst, &[0, 1, 2, 3]).unwrap();
        let stats = cell_stats(&inst, &sol);
        for (r, c) in stats.cells.iter().enumerate() {
            assert_eq!(c.members, vec![r]);
            assert_eq!(c.cost, 0.0);
            assert!(c.area > 0.0);
        }
    }

    #[test]
    fn path_single_cell() {
        let inst = path4(vec![1.0; 4]);
        let sol = Solution::new(&inst, &[1]).unwrap();
        let stats = cell_stats(&inst, &sol);
        assert_eq!(stats.cells.len(), 1);
        let c = &stats.cells[0];
        assert_eq!(c.members, vec![0, 1, 2, 3]);
        assert_eq!(c.cost, 4.0);
        assert_eq!(c.demand_sum, 4.0);
        assert_eq!(stats.total_cost(), sol.objective());
    }

    #[test]
    fn symmetric_clusters_have_equal_cost() {
        // Two mirrored triangles joined by a long bridge.
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(10.0, 0.0),
            Point::new(9.0, 0.0),
            Point::new(10.0, 1.0),
        ];
        let pairs = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (1, 4)];
        let g = Graph::euclidean(pts, &pairs).unwrap();
        let inst = Instance::new(g, vec![1.0; 6], InstanceMeta::default()).unwrap();
        let sol = Solution::new(&inst, &[0, 3]).unwrap();
        let stats = cell_stats(&inst, &sol);
        assert_eq!(stats.cells[0].cost, stats.cells[1].cost);
        assert_eq!(stats.cells[0].members, vec![0, 1, 2]);
        assert_eq!(
            cell_costs(&inst, &sol),
            vec![stats.cells[0].cost, stats.cells[1].cost]
        );
    }
}
