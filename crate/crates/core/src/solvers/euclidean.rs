use nalgebra::{DMatrix, DVector};

use crate::error::{FrechetError, Result};
use crate::frechet::{check_exponent, pow_distance};
use crate::measure::{compensated_sum, DiscreteMeasure};
use crate::spaces::EuclideanSpace;

use super::{SolverConfig, SolverOutcome, StartPoint};

/// Distance below which an iterate is considered to sit on a support atom.
const ANCHOR_TOLERANCE: f64 = 1e-12;

/// Merges repeated atoms in O(n log n) by sorting.
fn merge_atoms(space: &EuclideanSpace, mu: &DiscreteMeasure<Vec<f64>>) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    mu.check_in(space)?;
    let mut pairs: Vec<(&Vec<f64>, f64)> = mu.iter().filter(|(_, w)| *w > 0.0).collect();
    pairs.sort_by(|a, b| {
        a.0.iter()
            .zip(b.0.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut atoms: Vec<Vec<f64>> = Vec::with_capacity(pairs.len());
    let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
    for (y, w) in pairs {
        if atoms.last() == Some(y) {
            *weights.last_mut().unwrap() += w;
        } else {
            atoms.push(y.clone());
            weights.push(w);
        }
    }
    Ok((atoms, weights))
}

fn objective(atoms: &[Vec<f64>], weights: &[f64], x: &[f64], p: f64) -> f64 {
    compensated_sum(atoms.iter().zip(weights).map(|(y, w)| w * pow_distance(dist(x, y), p)))
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    if x.len() == 1 {
        return (x[0] - y[0]).abs();
    }
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `Σ w_i y_i`, coordinatewise compensated.
pub fn weighted_mean(space: &EuclideanSpace, mu: &DiscreteMeasure<Vec<f64>>) -> Result<Vec<f64>> {
    mu.check_in(space)?;
    Ok((0..space.dim)
        .map(|k| compensated_sum(mu.iter().map(|(y, w)| w * y[k])))
        .collect())
}

fn coordinate_median(atoms: &[Vec<f64>], weights: &[f64], dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|k| {
            let mut pairs: Vec<(f64, f64)> = atoms.iter().zip(weights).map(|(y, &w)| (y[k], w)).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut acc = 0.0;
            for (v, w) in &pairs {
                acc += w;
                if acc >= 0.5 {
                    return *v;
                }
            }
            pairs.last().map(|p| p.0).unwrap_or(0.0)
        })
        .collect()
}

fn start_point(
    config: &SolverConfig,
    space: &EuclideanSpace,
    mu: &DiscreteMeasure<Vec<f64>>,
    atoms: &[Vec<f64>],
    weights: &[f64],
) -> Result<Vec<f64>> {
    match config.start {
        StartPoint::WeightedMean => weighted_mean(space, mu),
        StartPoint::CoordinateMedian => Ok(coordinate_median(atoms, weights, space.dim)),
    }
}

/// Exact optimality test at atom `j`: the pull of the other atoms has norm at most `w_j`.
fn atom_is_optimal(atoms: &[Vec<f64>], weights: &[f64], j: usize) -> bool {
    let y = &atoms[j];
    let mut pull = vec![0.0; y.len()];
    for (i, (z, &w)) in atoms.iter().zip(weights).enumerate() {
        if i == j {
            continue;
        }
        let d = dist(z, y);
        for k in 0..y.len() {
            pull[k] += w * (z[k] - y[k]) / d;
        }
    }
    norm(&pull) <= weights[j]
}

fn nearest_atom(atoms: &[Vec<f64>], x: &[f64]) -> usize {
    (0..atoms.len())
        .min_by(|&a, &b| dist(x, &atoms[a]).total_cmp(&dist(x, &atoms[b])))
        .unwrap_or(0)
}

/// Newton step on the smooth part of the objective at a point off the support.
fn newton_step(atoms: &[Vec<f64>], weights: &[f64], x: &[f64]) -> Option<Vec<f64>> {
    let dim = x.len();
    if dim < 2 {
        return None;
    }
    let mut grad = DVector::zeros(dim);
    let mut hess = DMatrix::zeros(dim, dim);
    for (y, &w) in atoms.iter().zip(weights) {
        let d = dist(x, y);
        let u = DVector::from_iterator(dim, x.iter().zip(y).map(|(a, b)| (a - b) / d));
        grad += &u * w;
        hess += (DMatrix::identity(dim, dim) - &u * u.transpose()) * (w / d);
    }
    let step = hess.cholesky()?.solve(&grad);
    let next: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
    next.iter().all(|v| v.is_finite()).then_some(next)
}

fn degenerate_outcome(x: Vec<f64>) -> SolverOutcome<Vec<f64>> {
    SolverOutcome {
        point: x,
        value: 0.0,
        iterations: 0,
        trace: vec![0.0],
        notes: vec!["measure is a single atom".into()],
    }
}

/// Geometric median (p = 1) by the Weiszfeld iteration
/// `x ← Σ w_i y_i / d(x, y_i) / Σ w_i / d(x, y_i)`.
///
/// When an iterate lands on an atom `y_j` the subgradient test
/// `‖Σ_{i≠j} w_i (y_i − y_j)/d_i‖ ≤ w_j` decides optimality; otherwise the
/// Vardi–Zhang modified step leaves the atom. Off the support a Newton step
/// is tried as well and the better of the two candidates is kept. Steps that
/// would increase the objective are rejected, so the trace is nonincreasing.
/// In one dimension the lower weighted median is returned directly.
pub fn weiszfeld_median(
    space: &EuclideanSpace,
    mu: &DiscreteMeasure<Vec<f64>>,
    config: &SolverConfig,
) -> Result<SolverOutcome<Vec<f64>>> {
    config.validate()?;
    let (atoms, weights) = merge_atoms(space, mu)?;
    if atoms.len() == 1 {
        return Ok(degenerate_outcome(atoms[0].clone()));
    }
    let dim = space.dim;
    let mut x = start_point(config, space, mu, &atoms, &weights)?;
    let mut value = objective(&atoms, &weights, &x, 1.0);
    let mut trace = vec![value];
    let mut notes = Vec::new();
    if dim == 1 {
        let point = coordinate_median(&atoms, &weights, 1);
        let exact = objective(&atoms, &weights, &point, 1.0);
        trace.push(exact.min(value));
        notes.push("exact weighted median in one dimension".into());
        return Ok(SolverOutcome {
            point,
            value: exact,
            iterations: 1,
            trace,
            notes,
        });
    }
    for iter in 1..=config.max_iterations {
        let j = nearest_atom(&atoms, &x);
        if atom_is_optimal(&atoms, &weights, j) {
            notes.push(format!("optimal at support atom {j} (subgradient test)"));
            let at_atom = objective(&atoms, &weights, &atoms[j], 1.0);
            trace.push(at_atom.min(value));
            return Ok(SolverOutcome {
                point: atoms[j].clone(),
                value: at_atom,
                iterations: iter,
                trace,
                notes,
            });
        }
        let mut num = vec![0.0; dim];
        let mut den = 0.0;
        let mut anchor: Option<usize> = None;
        for (j, (y, &w)) in atoms.iter().zip(&weights).enumerate() {
            let d = dist(&x, y);
            if d <= ANCHOR_TOLERANCE * (1.0 + norm(y)) {
                anchor = Some(j);
                continue;
            }
            for k in 0..dim {
                num[k] += w * y[k] / d;
            }
            den += w / d;
        }
        let mut next: Vec<f64> = match anchor {
            None => num.iter().map(|v| v / den).collect(),
            Some(j) => {
                let y = &atoms[j];
                // resultant pull of the other atoms on y_j
                let pull: Vec<f64> = (0..dim).map(|k| num[k] - den * y[k]).collect();
                let r = norm(&pull);
                if r <= weights[j] {
                    notes.push(format!("optimal at support atom {j} (subgradient test)"));
                    let value = objective(&atoms, &weights, y, 1.0);
                    trace.push(value);
                    return Ok(SolverOutcome {
                        point: y.clone(),
                        value,
                        iterations: iter,
                        trace,
                        notes,
                    });
                }
                let keep = weights[j] / r;
                (0..dim).map(|k| (1.0 - keep) * (num[k] / den) + keep * y[k]).collect()
            }
        };
        let mut next_value = objective(&atoms, &weights, &next, 1.0);
        if anchor.is_none() {
            if let Some(newton) = newton_step(&atoms, &weights, &x) {
                let newton_value = objective(&atoms, &weights, &newton, 1.0);
                if newton_value < next_value {
                    next = newton;
                    next_value = newton_value;
                }
            }
        }
        if next_value > value {
            notes.push("stopped at numerical stagnation".into());
            return Ok(SolverOutcome {
                point: x,
                value,
                iterations: iter,
                trace,
                notes,
            });
        }
        let moved = dist(&next, &x);
        x = next;
        value = next_value;
        trace.push(value);
        if moved <= config.step_tolerance * (1.0 + norm(&x)) {
            return Ok(SolverOutcome {
                point: x,
                value,
                iterations: iter,
                trace,
                notes,
            });
        }
        // snap onto a nearby atom so the subgradient test can fire
        if let Some(j) = atoms
            .iter()
            .position(|y| dist(&x, y) <= ANCHOR_TOLERANCE * (1.0 + norm(y)))
        {
            x = atoms[j].clone();
            value = objective(&atoms, &weights, &x, 1.0);
            *trace.last_mut().unwrap() = value.min(*trace.last().unwrap());
        }
    }
    Err(FrechetError::NonConvergence {
        solver: "weiszfeld",
        iterations: config.max_iterations,
        last_value: value,
        last_iterate: x,
    })
}

/// Minimizer of `x ↦ Σ w_i ‖x − y_i‖^p` in `ℝ^dim` (convex for `p ≥ 1`).
///
/// `p = 2` returns the weighted mean and `p = 1` runs Weiszfeld. Other
/// exponents use gradient descent with Armijo backtracking started at the
/// configured start point, then compare the result with the support atoms.
pub fn euclidean_pmean(
    space: &EuclideanSpace,
    mu: &DiscreteMeasure<Vec<f64>>,
    p: f64,
    config: &SolverConfig,
) -> Result<SolverOutcome<Vec<f64>>> {
    check_exponent(p)?;
    config.validate()?;
    if p == 1.0 {
        return weiszfeld_median(space, mu, config);
    }
    let (atoms, weights) = merge_atoms(space, mu)?;
    if atoms.len() == 1 {
        return Ok(degenerate_outcome(atoms[0].clone()));
    }
    let mean = weighted_mean(space, mu)?;
    if p == 2.0 {
        let value = objective(&atoms, &weights, &mean, 2.0);
        return Ok(SolverOutcome {
            point: mean,
            value,
            iterations: 0,
            trace: vec![value],
            notes: vec!["closed form".into()],
        });
    }
    let dim = space.dim;
    let gradient = |x: &[f64]| -> Vec<f64> {
        let mut g = vec![0.0; dim];
        for (y, w) in atoms.iter().zip(&weights) {
            let d = dist(x, y);
            if d > 0.0 {
                let scale = w * p * pow_distance(d, p - 2.0);
                for k in 0..dim {
                    g[k] += scale * (x[k] - y[k]);
                }
            }
        }
        g
    };
    let mut x = start_point(config, space, mu, &atoms, &weights)?;
    let mut value = objective(&atoms, &weights, &x, p);
    let mut trace = vec![value];
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    for iter in 1..=config.max_iterations {
        iterations = iter;
        let g = gradient(&x);
        let gnorm2: f64 = g.iter().map(|v| v * v).sum();
        if gnorm2 == 0.0 {
            converged = true;
            break;
        }
        step *= 2.0;
        let mut accepted = None;
        for _ in 0..200 {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let v = objective(&atoms, &weights, &cand, p);
            if v <= value - 0.5 * step * gnorm2 {
                accepted = Some((cand, v));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, v)) = accepted else {
            converged = true;
            break;
        };
        let moved = dist(&cand, &x);
        let gain = value - v;
        x = cand;
        value = v;
        trace.push(value);
        if moved <= config.step_tolerance * (1.0 + norm(&x)) || gain <= config.value_tolerance * (1.0 + value.abs()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(FrechetError::NonConvergence {
            solver: "subgradient",
            iterations,
            last_value: value,
            last_iterate: x,
        });
    }
    let mut notes = Vec::new();
    for (j, y) in atoms.iter().enumerate() {
        let v = objective(&atoms, &weights, y, p);
        if v < value {
            x = y.clone();
            value = v;
            trace.push(value);
            notes.push(format!("support atom {j} improves on the descent iterate"));
        }
    }
    Ok(SolverOutcome {
        point: x,
        value,
        iterations,
        trace,
        notes,
    })
}
