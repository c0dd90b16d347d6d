use super::GroupAction;
use crate::error::{FrechetError, Result};
use crate::measure::DiscreteMeasure;
use crate::metric::{dedup_points, CandidateScheme, CandidateSet, MetricSpace};

/// `X/G` for a finite group acting by isometries. Points are orbit
/// representatives; `d_{X/G}(x, x') = min_g d(x, g·x')`.
#[derive(Debug, Clone)]
pub struct QuotientSpace<S, G> {
    pub base: S,
    pub group: G,
}

impl<S: MetricSpace, G: GroupAction<S::Point>> QuotientSpace<S, G> {
    pub fn new(base: S, group: G) -> Self {
        Self { base, group }
    }
}

/// `[g·x for g in G]`, deduplicated.
pub fn orbit<S, G>(space: &S, group: &G, x: &S::Point) -> Vec<S::Point>
where
    S: MetricSpace,
    G: GroupAction<S::Point>,
{
    dedup_points(space, (0..group.order()).map(|g| group.act(g, x)))
}

impl<S: MetricSpace, G: GroupAction<S::Point>> MetricSpace for QuotientSpace<S, G> {
    type Point = S::Point;

    fn distance(&self, x: &S::Point, y: &S::Point) -> f64 {
        (0..self.group.order())
            .map(|g| self.base.distance(x, &self.group.act(g, y)))
            .fold(f64::INFINITY, f64::min)
    }

    fn check_point(&self, x: &S::Point) -> Result<()> {
        self.base.check_point(x)
    }

    fn candidates(
        &self,
        mu: &DiscreteMeasure<S::Point>,
        scheme: &CandidateScheme<S::Point>,
    ) -> Result<CandidateSet<S::Point>> {
        self.base.candidates(mu, scheme)
    }

    fn refine_around(&self, x: &S::Point, radius: f64, resolution: f64) -> Result<Vec<S::Point>> {
        self.base.refine_around(x, radius, resolution)
    }

    fn describe(&self) -> String {
        format!(
            "quotient of {} by a group of order {}",
            self.base.describe(),
            self.group.order()
        )
    }
}

/// `X` with `d_{G,ρ/λ}(x, x') = min_g √(ρ(g,e)²/λ² + d(x, g·x')²)`: a soft quotient
/// that tends to `d` as `λ → 0` and to the quotient pseudometric as `λ → ∞`.
#[derive(Debug, Clone)]
pub struct RegularizedSpace<S, G> {
    pub base: S,
    pub group: G,
    pub lambda: f64,
}

impl<S: MetricSpace, G: GroupAction<S::Point>> RegularizedSpace<S, G> {
    pub fn new(base: S, group: G, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(FrechetError::argument(format!("scale must be positive, got {lambda}")));
        }
        if (0..group.order()).any(|g| group.length(g).is_none()) {
            return Err(FrechetError::config(
                "regularization needs a group with a length function",
            ));
        }
        Ok(Self { base, group, lambda })
    }
}

impl<S: MetricSpace, G: GroupAction<S::Point>> MetricSpace for RegularizedSpace<S, G> {
    type Point = S::Point;

    fn distance(&self, x: &S::Point, y: &S::Point) -> f64 {
        let e = self.group.identity();
        let mut best = self.base.distance(x, y);
        for g in (0..self.group.order()).filter(|&g| g != e) {
            let penalty = self.group.length(g).unwrap_or(f64::INFINITY) / self.lambda;
            if penalty >= best {
                continue;
            }
            let d = self.base.distance(x, &self.group.act(g, y));
            best = best.min(penalty.hypot(d));
        }
        best
    }

    fn check_point(&self, x: &S::Point) -> Result<()> {
        self.base.check_point(x)
    }

    fn same_point(&self, x: &S::Point, y: &S::Point) -> bool {
        self.base.same_point(x, y)
    }

    fn candidates(
        &self,
        mu: &DiscreteMeasure<S::Point>,
        scheme: &CandidateScheme<S::Point>,
    ) -> Result<CandidateSet<S::Point>> {
        self.base.candidates(mu, scheme)
    }

    fn refine_around(&self, x: &S::Point, radius: f64, resolution: f64) -> Result<Vec<S::Point>> {
        self.base.refine_around(x, radius, resolution)
    }

    fn describe(&self) -> String {
        format!(
            "regularization of {} by a group of order {} at scale {}",
            self.base.describe(),
            self.group.order(),
            self.lambda
        )
    }
}

/// `quotient_distance` from the construction's contract.
pub fn quotient_distance<S, G>(space: &QuotientSpace<S, G>, x: &S::Point, y: &S::Point) -> Result<f64>
where
    S: MetricSpace,
    G: GroupAction<S::Point>,
{
    space.try_distance(x, y)
}

/// `regularized_distance` from the construction's contract.
pub fn regularized_distance<S, G>(space: &RegularizedSpace<S, G>, x: &S::Point, y: &S::Point) -> Result<f64>
where
    S: MetricSpace,
    G: GroupAction<S::Point>,
{
    space.try_distance(x, y)
}
