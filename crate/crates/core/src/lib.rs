//! Set-valued Fréchet p-means on metric spaces: the relaxed mean-set
//! functional, concrete spaces and constructions, solvers, convergence
//! diagnostics and stochastic experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod convergence;
pub mod dynamic;
pub mod error;
pub mod frechet;
pub mod measure;
pub mod metric;
pub mod serde_ext;
pub mod solvers;
pub mod spaces;
pub mod stochastics;

pub use error::{FrechetError, Result};
pub use frechet::{
    frechet_functional, frechet_variance, moment, pow_distance, power_constant, relaxed_mean_set,
    renormalization_bound, FrechetConfig, MeanSetApprox, VALUE_TOLERANCE,
};
pub use measure::{compensated_sum, product_measure, DiscreteMeasure};
pub use metric::{CandidateScheme, CandidateSet, MetricSpace};
