//! Synthetic instances: grid cities with multi-centre population, Gabriel
//! graphs with centrality-driven demand, and the density scaling-law check.

mod centrality;
mod gabriel;
mod grid;
mod scaling;

use thiserror::Error;

use crate::instance::InstanceError;

pub use centrality::eigenvector_centrality;
pub use gabriel::{connect_components, gabriel_edges, gen_gabriel, GabrielParams};
pub use grid::{gen_grid_city, CbdCount, GridCityParams};
pub use scaling::{fit_scaling, verify_scaling_law, ScalingFit, SCALING_EXPONENT};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator parameter: {0}")]
    InvalidParams(String),
    #[error(
        "power iteration did not converge after {iterations} iterations (last change {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("scaling-law regression needs at least {needed} {what}, got {got}")]
    TooFewCells {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("scaling-law regression is degenerate: all cells share the same density")]
    Degenerate,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}
