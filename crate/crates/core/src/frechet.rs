//! The renormalized Fréchet functional and the mean sets built from it.
//!
//! For a measure `μ`, `W_p(μ, x, x') = Σ w_i (d^p(x, y_i) − d^p(x', y_i))`.
//! Minimizing `x ↦ W_p(μ, x, o)` gives the same set for every origin `o`;
//! only the attained level (the variance `V_p(μ, o)`) depends on `o`.

use rayon::prelude::*;

use crate::error::{FrechetError, Result};
use crate::measure::{compensated_sum, DiscreteMeasure};
use crate::metric::{CandidateSet, MetricSpace};

/// Relative slack used when collecting near-minimal candidates.
pub const VALUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FrechetConfig<P> {
    pub p: f64,
    /// Relaxation level `ε ≥ 0`; zero asks for the exact minimizers.
    pub epsilon: f64,
    /// Origin for the renormalized functional. `None` uses the first atom of `μ`.
    pub origin: Option<P>,
}

impl<P> FrechetConfig<P> {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            epsilon: 0.0,
            origin: None,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_origin(mut self, origin: P) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_exponent(self.p)?;
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(FrechetError::argument(format!(
                "epsilon must be a nonnegative real, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Finite approximation of a compact mean set `M_p(μ; ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanSetApprox<P> {
    pub points: Vec<P>,
    /// Covering radius of the candidate scheme the set was extracted from.
    pub resolution: f64,
    /// Smallest functional value over the candidates, relative to the origin used.
    pub achieved_value: f64,
}

impl<P> MeanSetApprox<P> {
    pub fn singleton(point: P, resolution: f64, achieved_value: f64) -> Self {
        Self {
            points: vec![point],
            resolution,
            achieved_value,
        }
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(FrechetError::argument(format!(
            "exponent p must satisfy p >= 1, got {p}"
        )))
    }
}

/// `d^p` with exact fast paths for the common integer exponents.
#[inline]
pub fn pow_distance(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else if p == 0.0 {
        1.0
    } else {
        d.powf(p)
    }
}

/// `W_p(μ, x, xref)` without validation.
pub(crate) fn functional_unchecked<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    x: &S::Point,
    xref: &S::Point,
    p: f64,
) -> f64 {
    compensated_sum(
        mu.iter()
            .map(|(y, w)| w * (pow_distance(space.distance(x, y), p) - pow_distance(space.distance(xref, y), p))),
    )
}

/// The Fréchet p-functional `W_p(μ, x, xref)`.
pub fn frechet_functional<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    x: &S::Point,
    xref: &S::Point,
    p: f64,
) -> Result<f64> {
    check_exponent(p)?;
    mu.check_in(space)?;
    check_query(space, x)?;
    check_query(space, xref)?;
    Ok(functional_unchecked(space, mu, x, xref, p))
}

/// `Σ w_i d^r(x, y_i)`.
pub fn moment<S: MetricSpace + ?Sized>(space: &S, mu: &DiscreteMeasure<S::Point>, r: f64, x: &S::Point) -> Result<f64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(FrechetError::argument(format!("moment order must be >= 0, got {r}")));
    }
    mu.check_in(space)?;
    check_query(space, x)?;
    Ok(moment_unchecked(space, mu, r, x))
}

pub(crate) fn moment_unchecked<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    r: f64,
    x: &S::Point,
) -> f64 {
    compensated_sum(mu.iter().map(|(y, w)| w * pow_distance(space.distance(x, y), r)))
}

/// Upper bound on `min_x W_p(μ, x, o)` given by the best candidate.
pub fn frechet_variance<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    config: &FrechetConfig<S::Point>,
    candidates: &CandidateSet<S::Point>,
) -> Result<f64> {
    let values = evaluate_candidates(space, mu, config, candidates)?;
    Ok(values.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Every candidate whose functional value lies within `ε` (plus a relative
/// floating-point slack) of the best candidate.
///
/// A measure concentrated on one point short-circuits to that point.
pub fn relaxed_mean_set<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    config: &FrechetConfig<S::Point>,
    candidates: &CandidateSet<S::Point>,
) -> Result<MeanSetApprox<S::Point>> {
    if mu.is_degenerate(space) {
        config.validate()?;
        mu.check_in(space)?;
        if candidates.is_empty() {
            return Err(FrechetError::argument("candidate set is empty"));
        }
        let atom = mu.first_atom().clone();
        let origin = config.origin.as_ref().unwrap_or(mu.first_atom());
        check_query(space, origin)?;
        let value = functional_unchecked(space, mu, &atom, origin, config.p);
        return Ok(MeanSetApprox::singleton(atom, candidates.resolution, value));
    }
    let values = evaluate_candidates(space, mu, config, candidates)?;
    Ok(band_from_values(candidates, &values, config.epsilon))
}

/// Selects the ε-band from precomputed functional values.
pub(crate) fn band_from_values<P: Clone>(
    candidates: &CandidateSet<P>,
    values: &[f64],
    epsilon: f64,
) -> MeanSetApprox<P> {
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let cutoff = best + epsilon + VALUE_TOLERANCE * (1.0 + best.abs());
    let points = candidates
        .points
        .iter()
        .zip(values)
        .filter(|(_, v)| **v <= cutoff)
        .map(|(x, _)| x.clone())
        .collect();
    MeanSetApprox {
        points,
        resolution: candidates.resolution,
        achieved_value: best,
    }
}

/// Functional values of every candidate, in candidate order.
pub(crate) fn evaluate_candidates<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    config: &FrechetConfig<S::Point>,
    candidates: &CandidateSet<S::Point>,
) -> Result<Vec<f64>> {
    config.validate()?;
    if candidates.is_empty() {
        return Err(FrechetError::argument("candidate set is empty"));
    }
    mu.check_in(space)?;
    for c in &candidates.points {
        check_query(space, c)?;
    }
    let origin = config.origin.as_ref().unwrap_or(mu.first_atom());
    check_query(space, origin)?;
    let p = config.p;
    // Origin term is shared by every candidate.
    let origin_term = moment_unchecked(space, mu, p, origin);
    let work = candidates.len() * mu.len();
    let eval = |x: &S::Point| moment_unchecked(space, mu, p, x) - origin_term;
    Ok(if work >= 4096 {
        candidates.points.par_iter().map(eval).collect()
    } else {
        candidates.points.iter().map(eval).collect()
    })
}

fn check_query<S: MetricSpace + ?Sized>(space: &S, x: &S::Point) -> Result<()> {
    space
        .check_point(x)
        .map_err(|e| FrechetError::config(format!("point is not in {}: {e}", space.describe())))
}

/// `c_r = max{1, 2^{r−1}}`, the constant in `d^r(x,x'') ≤ c_r (d^r(x,x') + d^r(x',x''))`.
pub fn power_constant(r: f64) -> f64 {
    1f64.max(2f64.powf(r - 1.0))
}

/// Right-hand side of the renormalization bound
/// `|W_p(μ,x,x')| ≤ p d(x,x') Σ w_i (d^{p−1}(x,y_i) + d^{p−1}(x',y_i))`.
pub fn renormalization_bound<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    x: &S::Point,
    xref: &S::Point,
    p: f64,
) -> f64 {
    let spread = compensated_sum(mu.iter().map(|(y, w)| {
        w * (pow_distance(space.distance(x, y), p - 1.0) + pow_distance(space.distance(xref, y), p - 1.0))
    }));
    p * space.distance(x, xref) * spread
}
