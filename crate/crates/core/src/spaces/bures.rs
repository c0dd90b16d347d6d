//! Covariance matrices under the Bures-Wasserstein metric
//! `Π(Σ, Σ')² = tr Σ + tr Σ' − 2 tr (Σ^{1/2} Σ' Σ^{1/2})^{1/2}`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{cartesian, centered_lattice};
use crate::error::{FrechetError, Result};
use crate::measure::DiscreteMeasure;
use crate::metric::{check_step, lattice, support_candidates, CandidateScheme, CandidateSet, MetricSpace};

/// Eigenvalues below this fraction of the largest one are treated as zero.
pub const EIGEN_CLAMP: f64 = 1e-12;
const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuresWassersteinSpace {
    pub dim: usize,
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(FrechetError::argument(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    if (m - m.transpose()).amax() > SYMMETRY_TOLERANCE * scale {
        return Err(FrechetError::argument("matrix is not symmetric"));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(FrechetError::argument("matrix has non-finite entries"));
    }
    Ok(())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Spectral function `U f(Λ) Uᵀ` with eigenvalues clamped to zero below the relative threshold.
fn spectral_map(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(symmetrize(m));
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let floor = EIGEN_CLAMP * top;
    let mapped = eig.eigenvalues.map(|l| if l <= floor { 0.0 } else { f(l) });
    let u = &eig.eigenvectors;
    symmetrize(&(u * DMatrix::from_diagonal(&mapped) * u.transpose()))
}

/// Symmetric positive semidefinite square root by spectral decomposition.
/// Negative (and negligible) eigenvalues are clamped to zero before rooting.
pub fn matrix_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(m)?;
    Ok(psd_sqrt(m))
}

pub(crate) fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    spectral_map(m, f64::sqrt)
}

/// Inverse square root on the range; zero on the clamped kernel.
pub(crate) fn psd_inv_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    spectral_map(m, |l| 1.0 / l.sqrt())
}

pub(crate) fn extreme_eigenvalues(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Ratio of extreme eigenvalues, zero for singular or zero matrices.
fn conditioning(m: &DMatrix<f64>) -> f64 {
    let (lo, hi) = extreme_eigenvalues(m);
    if hi <= 0.0 {
        0.0
    } else {
        (lo / hi).max(0.0)
    }
}

impl BuresWassersteinSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(FrechetError::argument("dimension must be positive"));
        }
        Ok(Self { dim })
    }

    /// Builds a matrix from its rows.
    pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(FrechetError::argument("matrix rows must form a nonempty square"));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn diagonal(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(values))
    }

    /// Number of free entries of a symmetric matrix.
    fn params(&self) -> usize {
        self.dim * (self.dim + 1) / 2
    }

    fn params_of(&self, s: &DMatrix<f64>) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.params());
        for i in 0..self.dim {
            for j in i..self.dim {
                out.push(s[(i, j)]);
            }
        }
        out
    }

    fn matrix_from(&self, v: &[f64]) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.dim, self.dim);
        let mut k = 0;
        for i in 0..self.dim {
            for j in i..self.dim {
                s[(i, j)] = v[k];
                s[(j, i)] = v[k];
                k += 1;
            }
        }
        s
    }

    /// Covering radius in `Π` of a lattice with this step over square-root entries:
    /// `Π(S², T²) ≤ ‖S − T‖_F`.
    pub fn lattice_resolution(&self, step: f64) -> f64 {
        0.5 * step * self.dim as f64
    }

    /// Squares of symmetric matrices whose entries run over the lattice.
    fn squares(&self, roots: Vec<Vec<f64>>) -> Vec<DMatrix<f64>> {
        roots
            .into_iter()
            .map(|v| {
                let s = self.matrix_from(&v);
                symmetrize(&(&s * &s))
            })
            .collect()
    }

    fn root_ball(&self, center: &DMatrix<f64>, radius: f64, step: f64) -> Result<Vec<DMatrix<f64>>> {
        self.check_point(center)?;
        let root = self.params_of(&psd_sqrt(center));
        Ok(self.squares(centered_lattice(&root, radius, step)?))
    }
}

impl MetricSpace for BuresWassersteinSpace {
    type Point = DMatrix<f64>;

    fn distance(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
        if x == y {
            return 0.0;
        }
        // Canonical argument order keeps the computed value exactly symmetric.
        let (cx, cy) = (conditioning(x), conditioning(y));
        let swap = match cx.partial_cmp(&cy) {
            Some(std::cmp::Ordering::Less) => true,
            Some(std::cmp::Ordering::Greater) => false,
            _ => x.iter().partial_cmp(y.iter()) == Some(std::cmp::Ordering::Greater),
        };
        let (a, b, ca) = if swap { (y, x, cy) } else { (x, y, cx) };
        let root_a = psd_sqrt(a);
        let cross = psd_sqrt(&(&root_a * b * &root_a));
        if ca > 1e-8 {
            // Π² = tr((T − I) A (T − I)) with T the optimal transport map; no cancellation.
            let inv_root = psd_inv_sqrt(a);
            let t = &inv_root * &cross * &inv_root;
            let d = t - DMatrix::identity(self.dim, self.dim);
            let sq = (&d * a * &d).trace();
            return sq.max(0.0).sqrt();
        }
        (a.trace() + b.trace() - 2.0 * cross.trace()).max(0.0).sqrt()
    }

    fn check_point(&self, x: &DMatrix<f64>) -> Result<()> {
        if x.nrows() != self.dim {
            return Err(FrechetError::argument(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                self.dim,
                x.nrows(),
                x.ncols()
            )));
        }
        check_symmetric(x)?;
        let (lo, hi) = extreme_eigenvalues(x);
        if lo < -1e-10 * hi.max(1.0) {
            return Err(FrechetError::argument(format!(
                "matrix is not positive semidefinite (eigenvalue {lo})"
            )));
        }
        Ok(())
    }

    fn same_point(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> bool {
        x == y
    }

    fn candidates(
        &self,
        mu: &DiscreteMeasure<DMatrix<f64>>,
        scheme: &CandidateScheme<DMatrix<f64>>,
    ) -> Result<CandidateSet<DMatrix<f64>>> {
        mu.check_in(self)?;
        match scheme {
            CandidateScheme::Support => Ok(support_candidates(self, mu)),
            CandidateScheme::Grid { step } => {
                check_step(*step)?;
                let roots: Vec<Vec<f64>> = mu.support().iter().map(|m| self.params_of(&psd_sqrt(m))).collect();
                let axes: Vec<Vec<f64>> = (0..self.params())
                    .map(|k| {
                        let lo = roots.iter().map(|r| r[k]).fold(f64::INFINITY, f64::min);
                        let hi = roots.iter().map(|r| r[k]).fold(f64::NEG_INFINITY, f64::max);
                        lattice(lo, hi, *step)
                    })
                    .collect();
                Ok(CandidateSet::new(
                    self.squares(cartesian(&axes)?),
                    self.lattice_resolution(*step),
                ))
            }
            CandidateScheme::BallGrid { center, radius, step } => Ok(CandidateSet::new(
                self.root_ball(center, *radius, *step)?,
                self.lattice_resolution(*step),
            )),
            CandidateScheme::SolverSeeded { seed, radius, step } => {
                let mut points = vec![seed.clone()];
                points.extend(self.root_ball(seed, *radius, *step)?);
                points.extend(mu.support().iter().cloned());
                Ok(CandidateSet::new(points, self.lattice_resolution(*step)))
            }
        }
    }

    /// Lattice over the entries of `x^{1/2}` within a cube of half-width `radius`.
    fn refine_around(&self, x: &DMatrix<f64>, radius: f64, resolution: f64) -> Result<Vec<DMatrix<f64>>> {
        let step = 2.0 * resolution / self.dim as f64;
        check_step(step)?;
        self.root_ball(x, radius, step)
    }

    fn describe(&self) -> String {
        format!("Bures-Wasserstein space of {0}x{0} covariance matrices", self.dim)
    }
}
