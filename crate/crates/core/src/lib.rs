//! Swap-based solvers for the p-median and facility relocation problems on
//! weighted graphs.
//!
//! The crate is organised around a small number of modules:
//!
//! * [`instance`] holds graphs, demand, shortest-path distances, the
//!   objective, Voronoi cell statistics, LP export and an exhaustive oracle.
//! * [`generators`] builds synthetic grid cities and Gabriel graphs.
//! * [`swap`] is the relocation framework with its pluggable agents.
//! * [`pmp`] solves the p-median problem from scratch.
//! * [`rlenv`] exposes relocation as an episodic environment over a
//!   line-delimited JSON protocol.

pub mod generators;
pub mod instance;
pub mod pmp;
pub mod rlenv;
pub mod rng;
pub mod swap;

pub use instance::{
    build_distance_matrix, cell_stats, exact_solve, exact_solve_with, export_ilp, objective,
    Assignment, CellStats, DistanceMatrix, Edge, ExactConfig, Graph, Instance, InstanceError,
    InstanceMeta, Point, Solution, DEFAULT_EXACT_CAP,
};
pub use pmp::{Initializer, PmpError, PmpResult};
pub use swap::{swap_relocate, RelocationPlan, SwapAgent, SwapError};

/// Relative tolerance used when comparing objective values.
pub const REL_TOL: f64 = 1e-9;

/// Returns true when `a` and `b` agree within [`REL_TOL`] relative to the
/// larger magnitude (absolute near zero).
pub fn approx_eq(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= REL_TOL * scale
}
