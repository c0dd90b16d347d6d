//! Probability measures on the real line under the `q`-Wasserstein metric.
//!
//! In one dimension the optimal coupling is the monotone one, so distances and
//! `W_2` barycenters reduce to operations on quantile functions.

use serde::{Deserialize, Serialize};

use super::cartesian;
use crate::error::{FrechetError, Result};
use crate::frechet::pow_distance;
use crate::measure::{compensated_sum, DiscreteMeasure, MASS_TOLERANCE};
use crate::metric::{check_step, lattice, support_candidates, CandidateScheme, CandidateSet, MetricSpace};

/// A finitely supported probability measure on `ℝ`, atoms strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure1D")]
pub struct Measure1D {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMeasure1D {
    atoms: Vec<f64>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

impl TryFrom<RawMeasure1D> for Measure1D {
    type Error = FrechetError;

    fn try_from(raw: RawMeasure1D) -> Result<Self> {
        match raw.weights {
            Some(w) => Measure1D::new(raw.atoms, w),
            None => Measure1D::uniform(raw.atoms),
        }
    }
}

impl Measure1D {
    /// Sorts atoms, merges repeats, and checks that the weights form a probability vector.
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(FrechetError::argument(
                "a measure on the line needs matching nonempty atoms and weights",
            ));
        }
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(FrechetError::argument("atoms must be finite"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(FrechetError::argument("weights must be nonnegative"));
        }
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(FrechetError::argument(format!("weights sum to {total}, expected 1")));
        }
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(weights).filter(|(_, w)| *w > 0.0).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (a, w) in pairs {
            if atoms.last() == Some(&a) {
                *weights.last_mut().unwrap() += w;
            } else {
                atoms.push(a);
                weights.push(w);
            }
        }
        Ok(Self { atoms, weights })
    }

    pub fn uniform(atoms: Vec<f64>) -> Result<Self> {
        let n = atoms.len();
        if n == 0 {
            return Err(FrechetError::argument("a measure on the line needs at least one atom"));
        }
        Self::new(atoms, vec![1.0 / n as f64; n])
    }

    pub fn dirac(a: f64) -> Self {
        Self {
            atoms: vec![a],
            weights: vec![1.0],
        }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Cumulative weights, with the last entry pinned to exactly one.
    fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        *out.last_mut().unwrap() = 1.0;
        out
    }

    /// Left-continuous quantile function `F^{-1}(u) = inf{x : F(x) ≥ u}`.
    pub fn quantile(&self, u: f64) -> f64 {
        let cum = self.cumulative();
        let idx = cum.partition_point(|c| *c < u).min(self.atoms.len() - 1);
        self.atoms[idx]
    }
}

/// Runs the monotone coupling of two measures, calling `f(mass, a, b)` per piece.
fn monotone_coupling(x: &Measure1D, y: &Measure1D, mut f: impl FnMut(f64, f64, f64)) {
    let cx = x.cumulative();
    let cy = y.cumulative();
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = 0.0;
    while i < cx.len() && j < cy.len() {
        let u = cx[i].min(cy[j]);
        let mass = u - prev;
        if mass > 0.0 {
            f(mass, x.atoms[i], y.atoms[j]);
        }
        prev = u;
        let advance_x = cx[i] <= u;
        let advance_y = cy[j] <= u;
        if advance_x {
            i += 1;
        }
        if advance_y {
            j += 1;
        }
    }
}

/// `𝒫_q(ℝ)` with the `q`-Wasserstein metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wasserstein1D {
    pub q: f64,
}

impl Wasserstein1D {
    pub fn new(q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= 1.0) {
            return Err(FrechetError::argument(format!(
                "Wasserstein order must be >= 1, got {q}"
            )));
        }
        Ok(Self { q })
    }

    /// Equal-weight `k`-atom measures with atoms on a lattice, `k` the largest member size.
    fn grid(&self, mu: &DiscreteMeasure<Measure1D>, step: f64) -> Result<Vec<Measure1D>> {
        check_step(step)?;
        let k = mu.support().iter().map(|m| m.atoms.len()).max().unwrap_or(1);
        let lo = mu.support().iter().map(|m| m.atoms[0]).fold(f64::INFINITY, f64::min);
        let hi = mu
            .support()
            .iter()
            .map(|m| *m.atoms.last().unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let axis = lattice(lo, hi, step);
        let mut out = Vec::new();
        let mut idx = vec![0usize; k];
        // nondecreasing index tuples enumerate sorted atom lists without repeats
        loop {
            let atoms: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            out.push(Measure1D::uniform(atoms)?);
            if out.len() > super::MAX_GRID_POINTS {
                return Err(FrechetError::argument("measure grid too large"));
            }
            let mut pos = k;
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                if idx[pos] + 1 < axis.len() {
                    let v = idx[pos] + 1;
                    for slot in idx.iter_mut().skip(pos) {
                        *slot = v;
                    }
                    break;
                }
            }
        }
    }
}

impl MetricSpace for Wasserstein1D {
    type Point = Measure1D;

    fn distance(&self, x: &Measure1D, y: &Measure1D) -> f64 {
        let q = self.q;
        let mut terms = Vec::with_capacity(x.atoms.len() + y.atoms.len());
        monotone_coupling(x, y, |mass, a, b| terms.push(mass * pow_distance((a - b).abs(), q)));
        let total = compensated_sum(terms);
        if q == 1.0 {
            total
        } else {
            total.powf(1.0 / q)
        }
    }

    fn check_point(&self, x: &Measure1D) -> Result<()> {
        if x.atoms.is_empty() || x.atoms.len() != x.weights.len() {
            return Err(FrechetError::argument("malformed measure on the line"));
        }
        if x.atoms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FrechetError::argument("atoms must be strictly increasing"));
        }
        Ok(())
    }

    fn same_point(&self, x: &Measure1D, y: &Measure1D) -> bool {
        x == y
    }

    fn candidates(
        &self,
        mu: &DiscreteMeasure<Measure1D>,
        scheme: &CandidateScheme<Measure1D>,
    ) -> Result<CandidateSet<Measure1D>> {
        mu.check_in(self)?;
        match scheme {
            CandidateScheme::Support => Ok(support_candidates(self, mu)),
            CandidateScheme::Grid { step } => Ok(CandidateSet::new(self.grid(mu, *step)?, 0.5 * step)),
            other => Err(FrechetError::config(format!(
                "candidate scheme {} is not supported by {}",
                other.name(),
                self.describe()
            ))),
        }
    }

    /// Moves every atom independently on a lattice around its current position.
    fn refine_around(&self, x: &Measure1D, radius: f64, resolution: f64) -> Result<Vec<Measure1D>> {
        let step = 2.0 * resolution;
        check_step(step)?;
        let reach = (radius / step + 1e-9).floor() as i64;
        let offsets: Vec<f64> = (-reach..=reach).map(|k| k as f64 * step).collect();
        let axes: Vec<Vec<f64>> = x
            .atoms
            .iter()
            .map(|a| offsets.iter().map(|o| a + o).collect())
            .collect();
        cartesian(&axes)?
            .into_iter()
            .map(|atoms| Measure1D::new(atoms, x.weights.clone()))
            .collect()
    }

    fn describe(&self) -> String {
        format!("{}-Wasserstein space over the real line", self.q)
    }
}

/// The `W_2` Fréchet mean of measures on the line: the measure whose quantile
/// function is the `μ`-weighted average of the members' quantile functions.
///
/// Quantile functions are merged on the union of all members' cumulative-weight
/// breakpoints, so the result is exact.
pub fn quantile_barycenter(space: &Wasserstein1D, mu: &DiscreteMeasure<Measure1D>, p: f64) -> Result<Measure1D> {
    if p != 2.0 || space.q != 2.0 {
        return Err(FrechetError::unsupported(format!(
            "quantile averaging gives the mean only for p = q = 2 (got p = {p}, q = {})",
            space.q
        )));
    }
    mu.check_in(space)?;
    let cumulatives: Vec<Vec<f64>> = mu.support().iter().map(Measure1D::cumulative).collect();
    let mut levels: Vec<f64> = cumulatives.iter().flatten().copied().collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut atoms = Vec::with_capacity(levels.len());
    let mut weights = Vec::with_capacity(levels.len());
    let mut prev = 0.0;
    for &u in &levels {
        let mass = u - prev;
        if mass <= 0.0 {
            continue;
        }
        let mid = 0.5 * (prev + u);
        let value = compensated_sum(mu.iter().zip(&cumulatives).map(|((member, w), cum)| {
            let idx = cum.partition_point(|c| *c < mid).min(member.atoms.len() - 1);
            w * member.atoms[idx]
        }));
        atoms.push(value);
        weights.push(mass);
        prev = u;
    }
    let total = compensated_sum(weights.iter().copied());
    Measure1D::new(atoms, weights.into_iter().map(|w| w / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_masses_are_at_distance_of_their_locations() {
        let w2 = Wasserstein1D::new(2.0).unwrap();
        assert_eq!(w2.distance(&Measure1D::dirac(-1.0), &Measure1D::dirac(2.5)), 3.5);
    }

    #[test]
    fn constructor_sorts_and_merges() {
        let m = Measure1D::new(vec![2.0, 0.0, 2.0], vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(m.atoms(), &[0.0, 2.0]);
        assert_eq!(m.weights(), &[0.5, 0.5]);
        assert_eq!(m.quantile(0.5), 0.0);
        assert_eq!(m.quantile(0.51), 2.0);
    }

    #[test]
    fn barycenter_of_two_diracs_is_the_midpoint() {
        let w2 = Wasserstein1D::new(2.0).unwrap();
        let mu = DiscreteMeasure::uniform(vec![Measure1D::dirac(0.0), Measure1D::dirac(2.0)]).unwrap();
        assert_eq!(quantile_barycenter(&w2, &mu, 2.0).unwrap(), Measure1D::dirac(1.0));
    }

    #[test]
    fn barycenter_of_one_member_is_that_member() {
        let w2 = Wasserstein1D::new(2.0).unwrap();
        let nu = Measure1D::new(vec![0.0, 1.0, 5.0], vec![0.2, 0.3, 0.5]).unwrap();
        let mu = DiscreteMeasure::dirac(nu.clone());
        assert_eq!(quantile_barycenter(&w2, &mu, 2.0).unwrap(), nu);
    }

    #[test]
    fn barycenter_of_shifted_uniforms() {
        let w2 = Wasserstein1D::new(2.0).unwrap();
        let a = Measure1D::uniform(vec![0.0, 1.0]).unwrap();
        let b = Measure1D::uniform(vec![1.0, 2.0]).unwrap();
        let mu = DiscreteMeasure::uniform(vec![a, b]).unwrap();
        let bar = quantile_barycenter(&w2, &mu, 2.0).unwrap();
        assert_eq!(bar, Measure1D::uniform(vec![0.5, 1.5]).unwrap());
    }

    #[test]
    fn barycenter_rejects_other_exponents() {
        let w1 = Wasserstein1D::new(1.0).unwrap();
        let mu = DiscreteMeasure::dirac(Measure1D::dirac(0.0));
        assert!(matches!(
            quantile_barycenter(&w1, &mu, 2.0),
            Err(FrechetError::Unsupported(_))
        ));
        let w2 = Wasserstein1D::new(2.0).unwrap();
        assert!(quantile_barycenter(&w2, &mu, 1.0).is_err());
    }

    #[test]
    fn json_shape() {
        let m: Measure1D = serde_json::from_str(r#"{"atoms":[1.0,0.0],"weights":[0.5,0.5]}"#).unwrap();
        assert_eq!(m.atoms(), &[0.0, 1.0]);
        let u: Measure1D = serde_json::from_str(r#"{"atoms":[3.0]}"#).unwrap();
        assert_eq!(u, Measure1D::dirac(3.0));
        assert!(serde_json::from_str::<Measure1D>(r#"{"atoms":[1.0],"weights":[0.4]}"#).is_err());
    }
}
