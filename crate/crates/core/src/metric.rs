//! The metric-space contract shared by every concrete space and construction.

use std::fmt::Debug;

use crate::error::{FrechetError, Result};
use crate::measure::DiscreteMeasure;

/// A metric space `(X, d)` with a concrete point representation.
///
/// `distance` assumes both points already passed [`MetricSpace::check_point`];
/// use [`MetricSpace::try_distance`] on untrusted input.
pub trait MetricSpace: Send + Sync {
    type Point: Clone + Debug + Send + Sync;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// Rejects points that do not belong to this space (wrong dimension, bad leg, ...).
    fn check_point(&self, x: &Self::Point) -> Result<()>;

    /// Point equality predicate. Defaults to `d(x, y) == 0`.
    fn same_point(&self, x: &Self::Point, y: &Self::Point) -> bool {
        self.distance(x, y) == 0.0
    }

    fn try_distance(&self, x: &Self::Point, y: &Self::Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.distance(x, y))
    }

    /// Deterministic candidate list for mean-set searches.
    ///
    /// Every space supports [`CandidateScheme::Support`]; grid-like schemes are
    /// opt-in per space.
    fn candidates(
        &self,
        mu: &DiscreteMeasure<Self::Point>,
        scheme: &CandidateScheme<Self::Point>,
    ) -> Result<CandidateSet<Self::Point>> {
        match scheme {
            CandidateScheme::Support => Ok(support_candidates(self, mu)),
            other => Err(FrechetError::config(format!(
                "candidate scheme {} is not supported by {}",
                other.name(),
                self.describe()
            ))),
        }
    }

    /// Points covering the ball of `radius` around `x` with covering radius
    /// at most `resolution`. Used by mean-set refinement.
    fn refine_around(&self, _x: &Self::Point, _radius: f64, _resolution: f64) -> Result<Vec<Self::Point>> {
        Err(FrechetError::unsupported(format!(
            "local refinement in {}",
            self.describe()
        )))
    }

    fn describe(&self) -> String;
}

/// How to enumerate candidate minimizers.
#[derive(Debug, Clone, PartialEq)]
pub enum CandidateScheme<P> {
    /// The support atoms of the measure.
    Support,
    /// Regular grid of the given step over the bounded region spanned by the support.
    Grid { step: f64 },
    /// Regular grid restricted to a ball.
    BallGrid { center: P, radius: f64, step: f64 },
    /// A solver output, a ball grid around it, and the support.
    SolverSeeded { seed: P, radius: f64, step: f64 },
}

impl<P> CandidateScheme<P> {
    pub fn name(&self) -> &'static str {
        match self {
            CandidateScheme::Support => "support",
            CandidateScheme::Grid { .. } => "grid",
            CandidateScheme::BallGrid { .. } => "ball-grid",
            CandidateScheme::SolverSeeded { .. } => "solver-seeded",
        }
    }
}

/// A finite candidate list with the covering radius it achieves over the
/// region it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet<P> {
    pub points: Vec<P>,
    pub resolution: f64,
}

impl<P> CandidateSet<P> {
    pub fn new(points: Vec<P>, resolution: f64) -> Self {
        Self { points, resolution }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Support atoms, deduplicated. The reported resolution is the support
/// diameter, a covering radius of the support's geodesic hull in a geodesic
/// space.
pub fn support_candidates<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
) -> CandidateSet<S::Point> {
    let points = dedup_points(space, mu.support().iter().cloned());
    let mut diameter: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            diameter = diameter.max(space.distance(a, b));
        }
    }
    CandidateSet::new(points, diameter.max(f64::MIN_POSITIVE))
}

/// Removes repeated points (by the space's equality predicate), keeping first occurrences.
pub fn dedup_points<S, I>(space: &S, points: I) -> Vec<S::Point>
where
    S: MetricSpace + ?Sized,
    I: IntoIterator<Item = S::Point>,
{
    let mut out: Vec<S::Point> = Vec::new();
    for p in points {
        if !out.iter().any(|q| space.same_point(q, &p)) {
            out.push(p);
        }
    }
    out
}

/// `lo + k * step` for every k with the value inside `[lo, hi]`, plus `hi`
/// if the lattice does not land on it.
pub(crate) fn lattice(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let v = lo + k as f64 * step;
        if v > hi + 1e-12 * step.max(hi.abs()) {
            break;
        }
        out.push(v.min(hi));
        k += 1;
    }
    if out.last().is_none_or(|&v| (hi - v).abs() > 1e-12 * (1.0 + hi.abs())) {
        out.push(hi);
    }
    out
}

pub(crate) fn check_step(step: f64) -> Result<()> {
    if step.is_finite() && step > 0.0 {
        Ok(())
    } else {
        Err(FrechetError::argument(format!(
            "grid step must be positive, got {step}"
        )))
    }
}
