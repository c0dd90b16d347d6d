use crate::error::{FrechetError, Result};
use crate::measure::DiscreteMeasure;
use crate::metric::{CandidateScheme, CandidateSet, MetricSpace};

/// `X₁ × X₂` with `d((x₁,x₂),(x₁',x₂')) = (d₁^q + d₂^q)^{1/q}`, `1 ≤ q < ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace<A, B> {
    pub left: A,
    pub right: B,
    pub q: f64,
}

impl<A: MetricSpace, B: MetricSpace> ProductSpace<A, B> {
    pub fn new(left: A, right: B, q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= 1.0) {
            return Err(FrechetError::argument(format!(
                "product exponent must lie in [1, inf), got {q}"
            )));
        }
        Ok(Self { left, right, q })
    }

    fn combine(&self, a: f64, b: f64) -> f64 {
        let q = self.q;
        if q == 1.0 {
            return a + b;
        }
        if q == 2.0 {
            return a.hypot(b);
        }
        let m = a.max(b);
        if m == 0.0 {
            0.0
        } else {
            m * ((a / m).powf(q) + (b / m).powf(q)).powf(1.0 / q)
        }
    }

    /// Projects a measure on pairs onto each factor.
    pub fn marginals(
        &self,
        mu: &DiscreteMeasure<(A::Point, B::Point)>,
    ) -> (DiscreteMeasure<A::Point>, DiscreteMeasure<B::Point>) {
        (mu.map(|(a, _)| a.clone()), mu.map(|(_, b)| b.clone()))
    }
}

/// `product_distance` from the construction's contract.
pub fn product_distance<A: MetricSpace, B: MetricSpace>(
    space: &ProductSpace<A, B>,
    a: &(A::Point, B::Point),
    b: &(A::Point, B::Point),
) -> Result<f64> {
    space.try_distance(a, b)
}

fn cartesian_pairs<P: Clone, Q: Clone>(left: &[P], right: &[Q]) -> Vec<(P, Q)> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for a in left {
        for b in right {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

impl<A: MetricSpace, B: MetricSpace> MetricSpace for ProductSpace<A, B> {
    type Point = (A::Point, B::Point);

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        self.combine(self.left.distance(&x.0, &y.0), self.right.distance(&x.1, &y.1))
    }

    fn check_point(&self, x: &Self::Point) -> Result<()> {
        self.left.check_point(&x.0)?;
        self.right.check_point(&x.1)
    }

    fn same_point(&self, x: &Self::Point, y: &Self::Point) -> bool {
        self.left.same_point(&x.0, &y.0) && self.right.same_point(&x.1, &y.1)
    }

    /// Cartesian product of the factor candidates built on the marginals.
    /// Ball schemes are split into per-factor balls of the same radius.
    fn candidates(
        &self,
        mu: &DiscreteMeasure<Self::Point>,
        scheme: &CandidateScheme<Self::Point>,
    ) -> Result<CandidateSet<Self::Point>> {
        let (ml, mr) = self.marginals(mu);
        let (sl, sr) = match scheme {
            CandidateScheme::Support => (CandidateScheme::Support, CandidateScheme::Support),
            CandidateScheme::Grid { step } => (
                CandidateScheme::Grid { step: *step },
                CandidateScheme::Grid { step: *step },
            ),
            CandidateScheme::BallGrid { center, radius, step } => (
                CandidateScheme::BallGrid {
                    center: center.0.clone(),
                    radius: *radius,
                    step: *step,
                },
                CandidateScheme::BallGrid {
                    center: center.1.clone(),
                    radius: *radius,
                    step: *step,
                },
            ),
            CandidateScheme::SolverSeeded { seed, radius, step } => (
                CandidateScheme::SolverSeeded {
                    seed: seed.0.clone(),
                    radius: *radius,
                    step: *step,
                },
                CandidateScheme::SolverSeeded {
                    seed: seed.1.clone(),
                    radius: *radius,
                    step: *step,
                },
            ),
        };
        let cl = self.left.candidates(&ml, &sl)?;
        let cr = self.right.candidates(&mr, &sr)?;
        Ok(CandidateSet::new(
            cartesian_pairs(&cl.points, &cr.points),
            self.combine(cl.resolution, cr.resolution),
        ))
    }

    fn refine_around(&self, x: &Self::Point, radius: f64, resolution: f64) -> Result<Vec<Self::Point>> {
        let per_factor = resolution / 2f64.powf(1.0 / self.q);
        let l = self.left.refine_around(&x.0, radius, per_factor)?;
        let r = self.right.refine_around(&x.1, radius, per_factor)?;
        Ok(cartesian_pairs(&l, &r))
    }

    fn describe(&self) -> String {
        format!(
            "l_{} product of ({}) and ({})",
            self.q,
            self.left.describe(),
            self.right.describe()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::EuclideanSpace;

    #[test]
    fn l2_and_l1_products() {
        let line = EuclideanSpace::line();
        let p2 = ProductSpace::new(line, line, 2.0).unwrap();
        let p1 = ProductSpace::new(line, line, 1.0).unwrap();
        let o = (vec![0.0], vec![0.0]);
        let x = (vec![3.0], vec![4.0]);
        assert_eq!(product_distance(&p2, &o, &x).unwrap(), 5.0);
        assert_eq!(product_distance(&p1, &o, &x).unwrap(), 7.0);
        assert_eq!(product_distance(&p2, &x, &x).unwrap(), 0.0);
        assert!(product_distance(&p2, &(vec![0.0, 1.0], vec![0.0]), &x).is_err());
        assert!(ProductSpace::new(line, line, 0.5).is_err());
    }
}
