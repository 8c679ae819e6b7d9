use serde::Serialize;

use super::GenError;
use crate::instance::{cell_stats, Instance, Solution};

/// Theoretical exponent of facility density against demand density.
pub const SCALING_EXPONENT: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub cells: usize,
}

/// Least-squares line through `(ln rho, ln D)`.
pub fn fit_scaling(rho: &[f64], fac_density: &[f64]) -> Result<ScalingFit, GenError> {
    let pts: Vec<(f64, f64)> = rho
        .iter()
        .zip(fac_density)
        .filter(|(r, d)| **r > 0.0 && **d > 0.0)
        .map(|(r, d)| (r.ln(), d.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(GenError::TooFewCells {
            what: "cells with positive demand",
            needed: 3,
            got: pts.len(),
        });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 1e-12 * m {
        return Err(GenError::Degenerate);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        1.0
    };
    Ok(ScalingFit {
        slope,
        intercept,
        r2,
        cells: pts.len(),
    })
}

/// Regresses facility density on demand density over the Voronoi cells of
/// `facilities`.
pub fn verify_scaling_law(
    instance: &Instance,
    facilities: &[usize],
) -> Result<ScalingFit, GenError> {
    if facilities.len() < 5 {
        return Err(GenError::TooFewCells {
            what: "facilities",
            needed: 5,
            got: facilities.len(),
        });
    }
    let sol = Solution::new(instance, facilities)?;
    let stats = cell_stats(instance, &sol);
    let rho: Vec<f64> = stats.cells.iter().map(|c| c.rho).collect();
    let density: Vec<f64> = stats.cells.iter().map(|c| c.fac_density).collect();
    fit_scaling(&rho, &density)
}
