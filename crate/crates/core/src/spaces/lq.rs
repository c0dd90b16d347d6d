use serde::{Deserialize, Serialize};

use super::{bounding_box_grid, centered_lattice, check_vector};
use crate::error::{FrechetError, Result};
use crate::measure::DiscreteMeasure;
use crate::metric::{check_step, support_candidates, CandidateScheme, CandidateSet, MetricSpace};

/// The first `truncation` coordinates of `ℓ_q`, a uniformly convex Banach space for `1 < q < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LqSequenceSpace {
    pub truncation: usize,
    pub q: f64,
}

impl LqSequenceSpace {
    pub fn new(truncation: usize, q: f64) -> Result<Self> {
        if truncation == 0 {
            return Err(FrechetError::argument("truncation must be positive"));
        }
        if !(q.is_finite() && q > 1.0) {
            return Err(FrechetError::argument(format!(
                "exponent q must lie in (1, inf), got {q}"
            )));
        }
        Ok(Self { truncation, q })
    }

    pub fn lattice_resolution(&self, step: f64) -> f64 {
        0.5 * step * (self.truncation as f64).powf(1.0 / self.q)
    }
}

impl MetricSpace for LqSequenceSpace {
    type Point = Vec<f64>;

    fn distance(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        let q = self.q;
        let scale = x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let s: f64 = x.iter().zip(y).map(|(a, b)| ((a - b).abs() / scale).powf(q)).sum();
        scale * s.powf(1.0 / q)
    }

    fn check_point(&self, x: &Vec<f64>) -> Result<()> {
        check_vector(x, self.truncation, "lq sequence space")
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
                bounding_box_grid(mu, self.truncation, *step)?,
                self.lattice_resolution(*step),
            )),
            CandidateScheme::BallGrid { center, radius, step } => {
                self.check_point(center)?;
                let pts = centered_lattice(center, *radius, *step)?
                    .into_iter()
                    .filter(|x| self.distance(x, center) <= radius + self.lattice_resolution(*step))
                    .collect();
                Ok(CandidateSet::new(pts, self.lattice_resolution(*step)))
            }
            other => Err(FrechetError::config(format!(
                "candidate scheme {} is not supported by {}",
                other.name(),
                self.describe()
            ))),
        }
    }

    fn refine_around(&self, x: &Vec<f64>, radius: f64, resolution: f64) -> Result<Vec<Vec<f64>>> {
        let step = 2.0 * resolution / (self.truncation as f64).powf(1.0 / self.q);
        check_step(step)?;
        self.check_point(x)?;
        Ok(centered_lattice(x, radius, step)?
            .into_iter()
            .filter(|y| self.distance(y, x) <= radius + resolution)
            .collect())
    }

    fn describe(&self) -> String {
        format!("l_{} truncated to {} coordinates", self.q, self.truncation)
    }
}
