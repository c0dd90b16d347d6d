//! Minimizers of the Fréchet functional. The grid oracle is the reference
//! every specialized solver is checked against.

mod bures;
mod euclidean;
mod refine;

use std::fmt;
use std::str::FromStr;

pub use bures::bw_barycenter;
pub use euclidean::{euclidean_pmean, weighted_mean, weiszfeld_median};
pub use refine::{refine_mean_set, refine_rounds};

use crate::error::{FrechetError, Result};
use crate::frechet::{relaxed_mean_set, FrechetConfig, MeanSetApprox};
use crate::measure::DiscreteMeasure;
use crate::metric::{CandidateSet, MetricSpace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop when an iterate moves less than this (relative to its size).
    pub step_tolerance: f64,
    /// Stop when the objective improves by less than this (relative).
    pub value_tolerance: f64,
    pub start: StartPoint,
}

/// Initial iterate for the Euclidean solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StartPoint {
    #[default]
    WeightedMean,
    /// Coordinatewise weighted median.
    CoordinateMedian,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            step_tolerance: 1e-12,
            value_tolerance: 1e-14,
            start: StartPoint::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || !(self.step_tolerance > 0.0) || !(self.value_tolerance > 0.0) {
            return Err(FrechetError::argument(
                "solver tolerances and iteration cap must be positive",
            ));
        }
        Ok(())
    }
}

/// Result of an iterative solver: the minimizer, its unrenormalized objective
/// `Σ w_i d^p(x, y_i)`, and the objective after every accepted iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome<P> {
    pub point: P,
    pub value: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
    pub notes: Vec<String>,
}

/// Solver names accepted in experiment configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Grid,
    Weiszfeld,
    Subgradient,
    Quantile,
    BwFixedPoint,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Grid => "grid",
            SolverKind::Weiszfeld => "weiszfeld",
            SolverKind::Subgradient => "subgradient",
            SolverKind::Quantile => "quantile",
            SolverKind::BwFixedPoint => "bw-fixed-point",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = FrechetError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "grid" => SolverKind::Grid,
            "weiszfeld" => SolverKind::Weiszfeld,
            "subgradient" => SolverKind::Subgradient,
            "quantile" => SolverKind::Quantile,
            "bw-fixed-point" => SolverKind::BwFixedPoint,
            other => return Err(FrechetError::config(format!("unknown solver {other:?}"))),
        })
    }
}

/// Exact ε-band over a finite grid; the brute-force ground truth.
pub fn grid_oracle<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    config: &FrechetConfig<S::Point>,
    grid: &CandidateSet<S::Point>,
) -> Result<MeanSetApprox<S::Point>> {
    if grid.is_empty() {
        return Err(FrechetError::argument("grid oracle needs a nonempty grid"));
    }
    relaxed_mean_set(space, mu, config, grid)
}
