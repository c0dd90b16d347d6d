//! Concrete metric spaces.

mod assignment;
pub(crate) mod bures;
mod euclidean;
mod lq;
mod persistence;
mod spider;
mod wasserstein;

pub use assignment::min_cost_assignment;
pub use bures::{matrix_sqrt, BuresWassersteinSpace};
pub use euclidean::EuclideanSpace;
pub use lq::LqSequenceSpace;
pub use persistence::{pd_distance, Diagram, PersistenceDiagramSpace};
pub use spider::{SpiderPoint, SpiderSpace};
pub use wasserstein::{quantile_barycenter, Measure1D, Wasserstein1D};

use crate::error::{FrechetError, Result};
use crate::measure::DiscreteMeasure;
use crate::metric::{check_step, lattice};

/// Hard cap on generated grid sizes.
pub const MAX_GRID_POINTS: usize = 5_000_000;

pub(crate) fn check_vector(x: &[f64], dim: usize, space: &str) -> Result<()> {
    if x.len() != dim {
        return Err(FrechetError::argument(format!(
            "{space} expects points of length {dim}, got {}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(FrechetError::argument(format!(
            "{space} point has non-finite coordinates"
        )));
    }
    Ok(())
}

/// Cartesian product of per-coordinate value lists.
pub(crate) fn cartesian(axes: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let total = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
        .unwrap_or(usize::MAX);
    if total > MAX_GRID_POINTS {
        return Err(FrechetError::argument(format!(
            "grid would have {total} points (limit {MAX_GRID_POINTS})"
        )));
    }
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(axes.len())];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &v in axis {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Lattice with the given step over the coordinate bounding box of the support.
pub(crate) fn bounding_box_grid(mu: &DiscreteMeasure<Vec<f64>>, dim: usize, step: f64) -> Result<Vec<Vec<f64>>> {
    check_step(step)?;
    let axes: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let (lo, hi) = mu
                .support()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| {
                    (lo.min(y[k]), hi.max(y[k]))
                });
            lattice(lo, hi, step)
        })
        .collect();
    cartesian(&axes)
}

/// Lattice points `center + step·k` (k integer) inside the cube of half-width `half_width`.
pub(crate) fn centered_lattice(center: &[f64], half_width: f64, step: f64) -> Result<Vec<Vec<f64>>> {
    check_step(step)?;
    let reach = (half_width / step + 1e-9).floor() as i64;
    let offsets: Vec<f64> = (-reach..=reach).map(|k| k as f64 * step).collect();
    let axes: Vec<Vec<f64>> = center.iter().map(|c| offsets.iter().map(|o| c + o).collect()).collect();
    cartesian(&axes)
}
