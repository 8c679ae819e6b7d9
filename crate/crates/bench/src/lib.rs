//! Fixtures shared by the solver benchmarks.

use swapfl_core::generators::{gen_gabriel, gen_grid_city, GabrielParams, GridCityParams};
use swapfl_core::pmp::density_init;
use swapfl_core::Instance;

pub fn grid(width: usize, seed: u64) -> Instance {
    gen_grid_city(&GridCityParams {
        width,
        seed,
        ..Default::default()
    })
    .expect("grid city")
}

pub fn gabriel(n: usize, seed: u64) -> Instance {
    gen_gabriel(&GabrielParams {
        n,
        seed,
        ..Default::default()
    })
    .expect("gabriel graph")
}

/// A density-sampled facility set for `instance`.
pub fn layout(instance: &Instance, p: usize, seed: u64) -> Vec<usize> {
    density_init(instance, p, seed).expect("p <= n")
}
