use nalgebra::DMatrix;

use crate::error::{FrechetError, Result};
use crate::measure::{compensated_sum, DiscreteMeasure};
use crate::metric::MetricSpace;
use crate::spaces::bures::{extreme_eigenvalues, psd_inv_sqrt, psd_sqrt, EIGEN_CLAMP};
use crate::spaces::BuresWassersteinSpace;

use super::{SolverConfig, SolverOutcome};

fn objective(space: &BuresWassersteinSpace, mu: &DiscreteMeasure<DMatrix<f64>>, s: &DMatrix<f64>) -> f64 {
    compensated_sum(mu.iter().map(|(c, w)| {
        let d = space.distance(s, c);
        w * d * d
    }))
}

/// Bures-Wasserstein barycenter (p = 2) by the fixed-point iteration
/// `S ← S^{-1/2} (Σ w_i (S^{1/2} Σ_i S^{1/2})^{1/2})² S^{-1/2}`,
/// started from the Euclidean average of the inputs.
///
/// Stops once consecutive iterates are within `step_tolerance` in `Π`.
/// Singular iterates are handled by clamping small eigenvalues, which is
/// recorded in the outcome notes.
pub fn bw_barycenter(
    space: &BuresWassersteinSpace,
    mu: &DiscreteMeasure<DMatrix<f64>>,
    config: &SolverConfig,
) -> Result<SolverOutcome<DMatrix<f64>>> {
    config.validate()?;
    mu.check_in(space)?;
    if mu.is_degenerate(space) {
        return Ok(SolverOutcome {
            point: mu.first_atom().clone(),
            value: 0.0,
            iterations: 0,
            trace: vec![0.0],
            notes: vec!["measure is a single atom".into()],
        });
    }
    let n = space.dim;
    let mut s = mu.iter().fold(DMatrix::zeros(n, n), |acc, (c, w)| acc + c * w);
    let mut notes = Vec::new();
    let mut trace = vec![objective(space, mu, &s)];
    let mut clamped = false;
    for iter in 1..=config.max_iterations {
        let (lo, hi) = extreme_eigenvalues(&s);
        if lo <= EIGEN_CLAMP * hi && !clamped {
            clamped = true;
            notes.push(format!("iterate {iter} is numerically singular; eigenvalues clamped"));
        }
        let root = psd_sqrt(&s);
        let inv_root = psd_inv_sqrt(&s);
        let m = mu.iter().fold(DMatrix::zeros(n, n), |acc, (c, w)| {
            acc + psd_sqrt(&(&root * c * &root)) * w
        });
        let mut next = &inv_root * &m * &m * &inv_root;
        next = (&next + next.transpose()) * 0.5;
        let step = space.distance(&next, &s);
        s = next;
        trace.push(objective(space, mu, &s));
        if !step.is_finite() {
            break;
        }
        if step <= config.step_tolerance.max(1e-13) * (1.0 + s.trace().abs().sqrt()) {
            let value = *trace.last().unwrap();
            return Ok(SolverOutcome {
                point: s,
                value,
                iterations: iter,
                trace,
                notes,
            });
        }
    }
    Err(FrechetError::NonConvergence {
        solver: "bw-fixed-point",
        iterations: config.max_iterations,
        last_value: *trace.last().unwrap(),
        last_iterate: s.iter().copied().collect(),
    })
}
