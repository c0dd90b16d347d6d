use crate::error::{FrechetError, Result};
use crate::metric::MetricSpace;

/// Tolerance on the total mass of a probability vector.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A finitely supported probability measure `Σ w_i δ_{y_i}`.
///
/// Empirical measures and reference measures share this representation; every
/// such measure has all moments finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<P> {
    support: Vec<P>,
    weights: Vec<f64>,
}

impl<P: Clone> DiscreteMeasure<P> {
    /// Builds a measure from atoms and weights that already sum to one.
    pub fn new(support: Vec<P>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(FrechetError::argument("measure must have at least one atom"));
        }
        if support.len() != weights.len() {
            return Err(FrechetError::argument(format!(
                "{} atoms but {} weights",
                support.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(FrechetError::argument(format!("negative or non-finite weight {w}")));
        }
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(FrechetError::argument(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { support, weights })
    }

    /// Normalizes nonnegative weights with positive total mass.
    pub fn from_unnormalized(support: Vec<P>, weights: Vec<f64>) -> Result<Self> {
        let total = compensated_sum(weights.iter().copied());
        if !(total.is_finite() && total > 0.0) {
            return Err(FrechetError::argument("total mass must be positive and finite"));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Self::new(support, weights)
    }

    /// Equal weights `1/n` on the given atoms (repeats allowed).
    pub fn uniform(support: Vec<P>) -> Result<Self> {
        let n = support.len();
        if n == 0 {
            return Err(FrechetError::argument("measure must have at least one atom"));
        }
        let weights = vec![1.0 / n as f64; n];
        Self::new(support, weights)
    }

    pub fn dirac(point: P) -> Self {
        Self {
            support: vec![point],
            weights: vec![1.0],
        }
    }

    pub fn support(&self) -> &[P] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, f64)> + '_ {
        self.support.iter().zip(self.weights.iter().copied())
    }

    /// Checks every atom against the space.
    pub fn check_in<S>(&self, space: &S) -> Result<()>
    where
        S: MetricSpace<Point = P> + ?Sized,
    {
        for y in &self.support {
            space
                .check_point(y)
                .map_err(|e| FrechetError::config(format!("measure is not supported on {}: {e}", space.describe())))?;
        }
        Ok(())
    }

    /// Merges atoms that are equal in `space`, summing their weights.
    /// Zero-weight atoms are dropped unless every atom has zero weight.
    pub fn compact<S>(&self, space: &S) -> Self
    where
        S: MetricSpace<Point = P> + ?Sized,
    {
        let mut support: Vec<P> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (y, w) in self.iter() {
            if w == 0.0 {
                continue;
            }
            match support.iter().position(|s| space.same_point(s, y)) {
                Some(k) => weights[k] += w,
                None => {
                    support.push(y.clone());
                    weights.push(w);
                }
            }
        }
        if support.is_empty() {
            return self.clone();
        }
        Self { support, weights }
    }

    /// True when every atom with positive weight is the same point.
    pub fn is_degenerate<S>(&self, space: &S) -> bool
    where
        S: MetricSpace<Point = P> + ?Sized,
    {
        let mut atoms = self.iter().filter(|(_, w)| *w > 0.0).map(|(y, _)| y);
        match atoms.next() {
            None => true,
            Some(first) => atoms.all(|y| space.same_point(first, y)),
        }
    }

    pub fn map<Q: Clone>(&self, f: impl Fn(&P) -> Q) -> DiscreteMeasure<Q> {
        DiscreteMeasure {
            support: self.support.iter().map(f).collect(),
            weights: self.weights.clone(),
        }
    }

    /// The first atom with positive weight; the default origin for functional evaluations.
    pub fn first_atom(&self) -> &P {
        self.iter()
            .find(|(_, w)| *w > 0.0)
            .map(|(y, _)| y)
            .unwrap_or(&self.support[0])
    }
}

/// Product measure on pairs of atoms.
pub fn product_measure<A: Clone, B: Clone>(
    left: &DiscreteMeasure<A>,
    right: &DiscreteMeasure<B>,
) -> DiscreteMeasure<(A, B)> {
    let mut support = Vec::with_capacity(left.len() * right.len());
    let mut weights = Vec::with_capacity(left.len() * right.len());
    for (a, wa) in left.iter() {
        for (b, wb) in right.iter() {
            support.push((a.clone(), b.clone()));
            weights.push(wa * wb);
        }
    }
    DiscreteMeasure { support, weights }
}

/// Neumaier-compensated summation.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_mass() {
        assert!(DiscreteMeasure::new(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(DiscreteMeasure::new(vec![0.0, 1.0], vec![-0.5, 1.5]).is_err());
        assert!(DiscreteMeasure::new(vec![0.0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::<f64>::uniform(vec![]).is_err());
    }

    #[test]
    fn large_uniform_measures_pass_the_mass_check() {
        for n in [3, 7, 1000, 100_000] {
            assert!(DiscreteMeasure::uniform(vec![0.0; n]).is_ok(), "n = {n}");
        }
    }

    #[test]
    fn unnormalized_weights_are_rescaled() {
        let mu = DiscreteMeasure::from_unnormalized(vec![1, 2], vec![1.0, 3.0]).unwrap();
        assert_eq!(mu.weights(), &[0.25, 0.75]);
    }

    #[test]
    fn product_weights_multiply() {
        let a = DiscreteMeasure::uniform(vec![0, 1]).unwrap();
        let b = DiscreteMeasure::new(vec!['x', 'y'], vec![0.25, 0.75]).unwrap();
        let ab = product_measure(&a, &b);
        assert_eq!(ab.len(), 4);
        assert!((compensated_sum(ab.weights().iter().copied()) - 1.0).abs() < 1e-15);
        assert_eq!(ab.weights()[1], 0.375);
    }
}
