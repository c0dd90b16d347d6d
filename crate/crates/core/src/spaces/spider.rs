use serde::{Deserialize, Serialize};

use crate::error::{FrechetError, Result};
use crate::measure::DiscreteMeasure;
use crate::metric::{
    check_step, dedup_points, lattice, support_candidates, CandidateScheme, CandidateSet, MetricSpace,
};

/// A point on a spider: arc length `t ≥ 0` along leg `leg`. Every leg's
/// `t = 0` is the shared center. Serialized as `[leg, t]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, f64)", into = "(usize, f64)")]
pub struct SpiderPoint {
    pub leg: usize,
    pub t: f64,
}

impl SpiderPoint {
    pub fn new(leg: usize, t: f64) -> Self {
        Self { leg, t }
    }

    pub fn center() -> Self {
        Self { leg: 0, t: 0.0 }
    }

    pub fn is_center(&self) -> bool {
        self.t == 0.0
    }
}

impl From<(usize, f64)> for SpiderPoint {
    fn from((leg, t): (usize, f64)) -> Self {
        Self { leg, t }
    }
}

impl From<SpiderPoint> for (usize, f64) {
    fn from(p: SpiderPoint) -> Self {
        (p.leg, p.t)
    }
}

/// `legs` copies of `[0, ∞)` glued at 0: a metric tree, hence a Hadamard space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpiderSpace {
    pub legs: usize,
}

impl SpiderSpace {
    pub fn new(legs: usize) -> Result<Self> {
        if legs == 0 {
            return Err(FrechetError::argument("a spider needs at least one leg"));
        }
        Ok(Self { legs })
    }

    fn ball_grid(&self, center: &SpiderPoint, radius: f64, step: f64) -> Result<Vec<SpiderPoint>> {
        check_step(step)?;
        self.check_point(center)?;
        let mut out = vec![*center];
        for leg in 0..self.legs {
            if leg == center.leg || center.is_center() {
                let lo = (center.t - radius).max(0.0);
                let below = ((center.t - lo) / step + 1e-9).floor() as i64;
                let above = (radius / step + 1e-9).floor() as i64;
                for k in -below..=above {
                    out.push(SpiderPoint::new(leg, (center.t + k as f64 * step).max(0.0)));
                }
                if lo == 0.0 {
                    out.push(SpiderPoint::center());
                }
            } else if radius > center.t {
                for s in lattice(0.0, radius - center.t, step) {
                    out.push(SpiderPoint::new(leg, s));
                }
            }
        }
        Ok(dedup_points(self, out))
    }
}

impl MetricSpace for SpiderSpace {
    type Point = SpiderPoint;

    fn distance(&self, x: &SpiderPoint, y: &SpiderPoint) -> f64 {
        if x.leg == y.leg || x.is_center() || y.is_center() {
            (x.t - y.t).abs()
        } else {
            x.t + y.t
        }
    }

    fn check_point(&self, x: &SpiderPoint) -> Result<()> {
        if x.leg >= self.legs {
            return Err(FrechetError::argument(format!(
                "leg {} out of range for a spider with {} legs",
                x.leg, self.legs
            )));
        }
        if !(x.t.is_finite() && x.t >= 0.0) {
            return Err(FrechetError::argument(format!("arc length must be >= 0, got {}", x.t)));
        }
        Ok(())
    }

    fn same_point(&self, x: &SpiderPoint, y: &SpiderPoint) -> bool {
        (x.is_center() && y.is_center()) || (x.leg == y.leg && x.t == y.t)
    }

    fn candidates(
        &self,
        mu: &DiscreteMeasure<SpiderPoint>,
        scheme: &CandidateScheme<SpiderPoint>,
    ) -> Result<CandidateSet<SpiderPoint>> {
        mu.check_in(self)?;
        match scheme {
            CandidateScheme::Support => Ok(support_candidates(self, mu)),
            CandidateScheme::Grid { step } => {
                check_step(*step)?;
                let reach = mu.support().iter().map(|y| y.t).fold(0.0, f64::max);
                let mut points = vec![SpiderPoint::center()];
                if reach > 0.0 {
                    for leg in 0..self.legs {
                        points.extend(
                            lattice(0.0, reach, *step)
                                .into_iter()
                                .skip(1)
                                .map(|t| SpiderPoint::new(leg, t)),
                        );
                    }
                }
                Ok(CandidateSet::new(points, 0.5 * step))
            }
            CandidateScheme::BallGrid { center, radius, step } => {
                Ok(CandidateSet::new(self.ball_grid(center, *radius, *step)?, 0.5 * step))
            }
            other => Err(FrechetError::config(format!(
                "candidate scheme {} is not supported by {}",
                other.name(),
                self.describe()
            ))),
        }
    }

    fn refine_around(&self, x: &SpiderPoint, radius: f64, resolution: f64) -> Result<Vec<SpiderPoint>> {
        self.ball_grid(x, radius, 2.0 * resolution)
    }

    fn describe(&self) -> String {
        format!("spider with {} legs", self.legs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_through_center() {
        let s = SpiderSpace::new(3).unwrap();
        let d = s.distance(&SpiderPoint::new(1, 0.5), &SpiderPoint::new(2, 0.7));
        assert!((d - 1.2).abs() < 1e-15);
        assert_eq!(
            s.distance(&SpiderPoint::new(1, 0.5), &SpiderPoint::new(1, 0.7)),
            0.7 - 0.5
        );
        assert!(s.same_point(&SpiderPoint::new(0, 0.0), &SpiderPoint::new(2, 0.0)));
        assert!(s.check_point(&SpiderPoint::new(3, 1.0)).is_err());
    }

    #[test]
    fn grid_has_center_and_every_leg() {
        let s = SpiderSpace::new(3).unwrap();
        let mu = DiscreteMeasure::uniform((0..3).map(|l| SpiderPoint::new(l, 1.0)).collect()).unwrap();
        let grid = s.candidates(&mu, &CandidateScheme::Grid { step: 0.25 }).unwrap();
        assert_eq!(grid.len(), 1 + 3 * 4);
        assert!(grid.points[0].is_center());
        assert_eq!(grid.resolution, 0.125);
    }

    #[test]
    fn ball_grid_crosses_the_center() {
        let s = SpiderSpace::new(3).unwrap();
        let pts = s.ball_grid(&SpiderPoint::new(0, 0.2), 0.5, 0.1).unwrap();
        assert!(pts.iter().any(|p| p.leg == 1 && (p.t - 0.3).abs() < 1e-12));
        assert!(pts.iter().any(|p| p.is_center()));
        assert!(pts
            .iter()
            .all(|p| s.distance(p, &SpiderPoint::new(0, 0.2)) <= 0.5 + 1e-9));
    }
}
