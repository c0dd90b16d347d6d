use serde::{Deserialize, Serialize};

use super::{bounding_box_grid, centered_lattice, check_vector};
use crate::error::{FrechetError, Result};
use crate::measure::DiscreteMeasure;
use crate::metric::{check_step, dedup_points, support_candidates, CandidateScheme, CandidateSet, MetricSpace};

/// `ℝ^dim` with the Euclidean norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EuclideanSpace {
    pub dim: usize,
}

impl EuclideanSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(FrechetError::argument("dimension must be positive"));
        }
        Ok(Self { dim })
    }

    /// The real line.
    pub fn line() -> Self {
        Self { dim: 1 }
    }

    /// Covering radius of a cubic lattice with this step.
    pub fn lattice_resolution(&self, step: f64) -> f64 {
        0.5 * step * (self.dim as f64).sqrt()
    }

    fn ball_grid(&self, center: &[f64], radius: f64, step: f64) -> Result<Vec<Vec<f64>>> {
        check_vector(center, self.dim, "euclidean space")?;
        let cube = centered_lattice(center, radius, step)?;
        let slack = self.lattice_resolution(step);
        Ok(cube
            .into_iter()
            .filter(|x| self.distance(x, &center.to_vec()) <= radius + slack)
            .collect())
    }
}

pub(crate) fn euclidean_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

impl MetricSpace for EuclideanSpace {
    type Point = Vec<f64>;

    fn distance(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        if self.dim == 1 {
            return (x[0] - y[0]).abs();
        }
        euclidean_distance(x, y)
    }

    fn check_point(&self, x: &Vec<f64>) -> Result<()> {
        check_vector(x, self.dim, "euclidean space")
    }

    fn same_point(&self, x: &Vec<f64>, y: &Vec<f64>) -> bool {
        x == y
    }

    fn candidates(
        &self,
        mu: &DiscreteMeasure<Vec<f64>>,
        scheme: &CandidateScheme<Vec<f64>>,
    ) -> Result<CandidateSet<Vec<f64>>> {
        mu.check_in(self)?;
        match scheme {
            CandidateScheme::Support => Ok(support_candidates(self, mu)),
            CandidateScheme::Grid { step } => Ok(CandidateSet::new(
                bounding_box_grid(mu, self.dim, *step)?,
                self.lattice_resolution(*step),
            )),
            CandidateScheme::BallGrid { center, radius, step } => Ok(CandidateSet::new(
                self.ball_grid(center, *radius, *step)?,
                self.lattice_resolution(*step),
            )),
            CandidateScheme::SolverSeeded { seed, radius, step } => {
                let mut points = vec![seed.clone()];
                points.extend(self.ball_grid(seed, *radius, *step)?);
                points.extend(mu.support().iter().cloned());
                Ok(CandidateSet::new(
                    dedup_points(self, points),
                    self.lattice_resolution(*step),
                ))
            }
        }
    }

    fn refine_around(&self, x: &Vec<f64>, radius: f64, resolution: f64) -> Result<Vec<Vec<f64>>> {
        let step = 2.0 * resolution / (self.dim as f64).sqrt();
        check_step(step)?;
        self.ball_grid(x, radius, step)
    }

    fn describe(&self) -> String {
        format!("euclidean space of dimension {}", self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_support_box() {
        let line = EuclideanSpace::line();
        let mu = DiscreteMeasure::uniform(vec![vec![0.0], vec![1.0]]).unwrap();
        let grid = line.candidates(&mu, &CandidateScheme::Grid { step: 0.5 }).unwrap();
        assert_eq!(grid.points, vec![vec![0.0], vec![0.5], vec![1.0]]);
        assert_eq!(grid.resolution, 0.25);
        let support = line.candidates(&mu, &CandidateScheme::Support).unwrap();
        assert_eq!(support.points, vec![vec![0.0], vec![1.0]]);
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let plane = EuclideanSpace::new(2).unwrap();
        assert!(plane.try_distance(&vec![0.0], &vec![1.0, 2.0]).is_err());
        assert!(EuclideanSpace::new(0).is_err());
    }

    #[test]
    fn refinement_contains_center_and_respects_radius() {
        let plane = EuclideanSpace::new(2).unwrap();
        let pts = plane.refine_around(&vec![1.0, 1.0], 0.5, 0.1).unwrap();
        assert!(pts.iter().any(|p| p == &vec![1.0, 1.0]));
        assert!(pts
            .iter()
            .all(|p| plane.distance(p, &vec![1.0, 1.0]) <= 0.5 + 0.1 + 1e-12));
    }
}
