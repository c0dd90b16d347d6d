//! Persistence diagrams under the partial-matching metric
//!
//! `B_q(P, P') = min_φ (Σ ‖x − φ(x)‖^q)^{1/q}` over bijections of `P ∪ Δ` and
//! `P' ∪ Δ`. Points may be matched to the diagonal `Δ`; the ground norm on `ℝ²` is ℓ2.

use serde::{Deserialize, Serialize};

use super::min_cost_assignment;
use crate::error::{FrechetError, Result};
use crate::frechet::pow_distance;
use crate::metric::MetricSpace;

/// A finite multiset of points `(birth, death)` with `birth < death`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Diagram(pub Vec<(f64, f64)>);

impl Diagram {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        Self(points)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn sorted(&self) -> Vec<(f64, f64)> {
        let mut pts = self.0.clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        pts
    }
}

/// ℓ2 distance from `(b, d)` to its orthogonal projection `((b+d)/2, (b+d)/2)`.
pub(crate) fn diagonal_distance((b, d): (f64, f64)) -> f64 {
    (d - b) / std::f64::consts::SQRT_2
}

fn point_distance(x: (f64, f64), y: (f64, f64)) -> f64 {
    (x.0 - y.0).hypot(x.1 - y.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagramSpace {
    pub q: f64,
}

impl PersistenceDiagramSpace {
    pub fn new(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 1.0) {
            return Err(FrechetError::argument(format!(
                "diagram order q must lie in (1, inf), got {q}"
            )));
        }
        Ok(Self { q })
    }

    /// Square cost matrix of size `|P| + |P'|`: rows are `P` then diagonal slots
    /// for `P'`, columns are `P'` then diagonal slots for `P`. A point may only
    /// use its own diagonal slot; diagonal-to-diagonal pairs are free.
    pub fn cost_matrix(&self, x: &Diagram, y: &Diagram) -> Vec<Vec<f64>> {
        let (n, m) = (x.len(), y.len());
        let q = self.q;
        let mut cost = vec![vec![f64::INFINITY; n + m]; n + m];
        for (i, &a) in x.0.iter().enumerate() {
            for (j, &b) in y.0.iter().enumerate() {
                cost[i][j] = pow_distance(point_distance(a, b), q);
            }
            cost[i][m + i] = pow_distance(diagonal_distance(a), q);
        }
        for (j, &b) in y.0.iter().enumerate() {
            cost[n + j][j] = pow_distance(diagonal_distance(b), q);
            for k in 0..n {
                cost[n + j][m + k] = 0.0;
            }
        }
        cost
    }
}

/// `B_q` between two diagrams via an optimal assignment.
pub fn pd_distance(space: &PersistenceDiagramSpace, x: &Diagram, y: &Diagram) -> f64 {
    if x.is_empty() && y.is_empty() {
        return 0.0;
    }
    let (total, _) = min_cost_assignment(&space.cost_matrix(x, y));
    total.max(0.0).powf(1.0 / space.q)
}

impl MetricSpace for PersistenceDiagramSpace {
    type Point = Diagram;

    fn distance(&self, x: &Diagram, y: &Diagram) -> f64 {
        pd_distance(self, x, y)
    }

    fn check_point(&self, x: &Diagram) -> Result<()> {
        for &(b, d) in &x.0 {
            if !(b.is_finite() && d.is_finite() && b < d) {
                return Err(FrechetError::argument(format!(
                    "diagram point ({b}, {d}) must be finite and above the diagonal"
                )));
            }
        }
        Ok(())
    }

    fn same_point(&self, x: &Diagram, y: &Diagram) -> bool {
        x.len() == y.len() && x.sorted() == y.sorted()
    }

    fn describe(&self) -> String {
        format!("persistence diagrams with the order-{} partial matching metric", self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_against_empty_diagram() {
        let s = PersistenceDiagramSpace::new(2.0).unwrap();
        let d = s.distance(&Diagram::new(vec![(0.0, 2.0)]), &Diagram::empty());
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn close_points_match_directly() {
        let s = PersistenceDiagramSpace::new(2.0).unwrap();
        let d = s.distance(&Diagram::new(vec![(0.0, 2.0)]), &Diagram::new(vec![(0.0, 2.1)]));
        assert!((d - 0.1).abs() < 1e-12);
    }

    #[test]
    fn identical_diagrams_are_at_zero() {
        let s = PersistenceDiagramSpace::new(3.0).unwrap();
        let p = Diagram::new(vec![(0.0, 1.0), (0.5, 3.0), (0.0, 1.0)]);
        assert_eq!(s.distance(&p, &p), 0.0);
        let shuffled = Diagram::new(vec![(0.5, 3.0), (0.0, 1.0), (0.0, 1.0)]);
        assert!(s.same_point(&p, &shuffled));
    }

    #[test]
    fn rejects_points_below_the_diagonal() {
        let s = PersistenceDiagramSpace::new(2.0).unwrap();
        assert!(s.check_point(&Diagram::new(vec![(1.0, 1.0)])).is_err());
        assert!(PersistenceDiagramSpace::new(1.0).is_err());
    }
}
