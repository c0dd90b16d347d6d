use std::collections::{BTreeMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::{Distribution, SamplerKind, SamplerSpec};
use crate::convergence::{one_sided_hausdorff, tau_w_r_distance, CellFailure, ConvergenceReport};
use crate::error::{FrechetError, Result};
use crate::frechet::{frechet_functional, relaxed_mean_set, FrechetConfig, MeanSetApprox};
use crate::measure::DiscreteMeasure;
use crate::metric::{CandidateScheme, MetricSpace};
use crate::solvers::{euclidean_pmean, SolverConfig, SolverKind};
use crate::spaces::EuclideanSpace;

/// Atoms in the quantile discretization of a continuous one-dimensional target.
pub const TARGET_ATOMS: usize = 1000;

/// Shared settings of the SLLN and ergodic experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSettings {
    pub p: f64,
    #[serde(default)]
    pub epsilon: f64,
    pub n_grid: Vec<usize>,
    #[serde(default = "one")]
    pub replications: usize,
    #[serde(default = "default_solver", with = "solver_name")]
    pub solver: SolverKind,
    /// Lattice step for the grid solver and grid targets.
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    /// Acceptance level for the final max-`d⃗`, if any.
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(skip)]
    pub solver_config: SolverConfig,
}

fn one() -> usize {
    1
}

fn default_solver() -> SolverKind {
    SolverKind::Subgradient
}

fn default_grid_step() -> f64 {
    0.01
}

pub(crate) mod solver_name {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::solvers::SolverKind;

    pub fn serialize<S: Serializer>(k: &SolverKind, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(k.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SolverKind, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl ExperimentSettings {
    pub fn new(p: f64, n_grid: Vec<usize>, replications: usize, solver: SolverKind) -> Self {
        Self {
            p,
            epsilon: 0.0,
            n_grid,
            replications,
            solver,
            grid_step: default_grid_step(),
            threshold: None,
            solver_config: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(FrechetError::config("p must be a finite real ≥ 1"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(FrechetError::config("epsilon must be nonnegative"));
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(FrechetError::config("n_grid must be a nonempty list of positive sizes"));
        }
        if self.replications == 0 {
            return Err(FrechetError::config("replications must be positive"));
        }
        if !(self.grid_step > 0.0) || !self.grid_step.is_finite() {
            return Err(FrechetError::config("grid_step must be positive"));
        }
        self.solver_config.validate()
    }
}

/// Approximates `M_p(μ; ε)` in `ℝ^dim` with the named solver. Specialized
/// solvers return a single point of the band with resolution zero.
pub fn estimate_mean_set(
    space: &EuclideanSpace,
    mu: &DiscreteMeasure<Vec<f64>>,
    p: f64,
    epsilon: f64,
    solver: SolverKind,
    grid_step: f64,
    solver_config: &SolverConfig,
) -> Result<MeanSetApprox<Vec<f64>>> {
    let config = FrechetConfig::new(p).with_epsilon(epsilon);
    match solver {
        SolverKind::Grid => {
            let grid = space.candidates(mu, &CandidateScheme::Grid { step: grid_step })?;
            relaxed_mean_set(space, mu, &config, &grid)
        }
        SolverKind::Weiszfeld | SolverKind::Subgradient => {
            if solver == SolverKind::Weiszfeld && p != 1.0 {
                return Err(FrechetError::config("the weiszfeld solver requires p = 1"));
            }
            let out = euclidean_pmean(space, mu, p, solver_config)?;
            let value = frechet_functional(space, mu, &out.point, mu.first_atom(), p)?;
            Ok(MeanSetApprox::singleton(out.point, 0.0, value))
        }
        other => Err(FrechetError::config(format!(
            "solver {other} does not apply to Euclidean samples"
        ))),
    }
}

fn cartesian_law(values: &[f64], probs: &[f64], dim: usize) -> Result<DiscreteMeasure<Vec<f64>>> {
    let mut support = vec![Vec::new()];
    let mut weights = vec![1.0];
    for _ in 0..dim {
        let mut s2 = Vec::new();
        let mut w2 = Vec::new();
        for (x, w) in support.iter().zip(&weights) {
            for (v, p) in values.iter().zip(probs) {
                let mut y: Vec<f64> = x.clone();
                y.push(*v);
                s2.push(y);
                w2.push(w * p);
            }
        }
        support = s2;
        weights = w2;
    }
    DiscreteMeasure::from_unnormalized(support, weights)
}

/// Target mean set and a finitely supported stand-in for the sampled law.
fn iid_target(
    space: &EuclideanSpace,
    distribution: &Distribution,
    dim: usize,
    sampler: &SamplerSpec,
    settings: &ExperimentSettings,
) -> Result<(MeanSetApprox<Vec<f64>>, DiscreteMeasure<Vec<f64>>)> {
    if let Some((values, probs)) = distribution.finite_law() {
        let law = cartesian_law(&values, &probs, dim)?;
        let target = estimate_mean_set(
            space,
            &law,
            settings.p,
            0.0,
            settings.solver,
            settings.grid_step,
            &settings.solver_config,
        )?;
        return Ok((target, law));
    }
    let symmetric = matches!(
        distribution,
        Distribution::Normal { .. } | Distribution::Uniform { .. } | Distribution::Cauchy { .. }
    );
    let m = distribution
        .analytic_minimizer(settings.p)
        .filter(|_| dim == 1 || symmetric || settings.p == 2.0)
        .ok_or_else(|| {
            FrechetError::config(format!(
                "no closed-form mean set for {distribution:?} with p = {} in dimension {dim}",
                settings.p
            ))
        })?;
    let reference = if dim == 1 {
        let atoms: Vec<Vec<f64>> = (0..TARGET_ATOMS)
            .map(|k| vec![distribution.quantile((k as f64 + 0.5) / TARGET_ATOMS as f64)])
            .collect();
        DiscreteMeasure::uniform(atoms)?
    } else {
        DiscreteMeasure::uniform(sampler.sample_path(TARGET_ATOMS, u64::MAX)?)?
    };
    Ok((MeanSetApprox::singleton(vec![m; dim], 0.0, 0.0), reference))
}

fn check_dims(space: &EuclideanSpace, sampler: &SamplerSpec) -> Result<()> {
    if sampler.dim() != space.dim {
        return Err(FrechetError::config(format!(
            "sampler produces points of dimension {}, space has dimension {}",
            sampler.dim(),
            space.dim
        )));
    }
    Ok(())
}

struct Cell {
    dvec: f64,
    bl: f64,
    gap: f64,
    failure: Option<String>,
}

/// Runs every replication over the sample-size grid and aggregates the worst case per `n`.
fn run_trajectories(
    space: &EuclideanSpace,
    sampler: &SamplerSpec,
    settings: &ExperimentSettings,
    target: &MeanSetApprox<Vec<f64>>,
    reference: &DiscreteMeasure<Vec<f64>>,
) -> Result<ConvergenceReport> {
    let max_n = *settings.n_grid.iter().max().unwrap();
    let rows: Vec<Result<Vec<Cell>>> = (0..settings.replications)
        .into_par_iter()
        .map(|rep| {
            let path = sampler.sample_path(max_n, rep as u64)?;
            Ok(settings
                .n_grid
                .iter()
                .map(|&n| {
                    let cell = || -> Result<Cell> {
                        let mu = DiscreteMeasure::uniform(path[..n].to_vec())?;
                        let est = estimate_mean_set(
                            space,
                            &mu,
                            settings.p,
                            settings.epsilon,
                            settings.solver,
                            settings.grid_step,
                            &settings.solver_config,
                        )?;
                        let dvec = one_sided_hausdorff(space, &est.points, &target.points)?;
                        let tau = tau_w_r_distance(space, &mu, reference, settings.p - 1.0)?;
                        Ok(Cell {
                            dvec,
                            bl: tau.bl,
                            gap: tau.moment_gap,
                            failure: None,
                        })
                    };
                    cell().unwrap_or_else(|e| Cell {
                        dvec: f64::NAN,
                        bl: f64::NAN,
                        gap: f64::NAN,
                        failure: Some(e.to_string()),
                    })
                })
                .collect())
        })
        .collect();
    let mut table = Vec::with_capacity(rows.len());
    for r in rows {
        table.push(r?);
    }
    let worst = |pick: &dyn Fn(&Cell) -> f64, j: usize| {
        table
            .iter()
            .map(|row| pick(&row[j]))
            .filter(|v| !v.is_nan())
            .fold(f64::NAN, f64::max)
    };
    let len = settings.n_grid.len();
    let dvec: Vec<f64> = (0..len).map(|j| worst(&|c| c.dvec, j)).collect();
    let bl: Vec<f64> = (0..len).map(|j| worst(&|c| c.bl, j)).collect();
    let gap: Vec<f64> = (0..len).map(|j| worst(&|c| c.gap, j)).collect();
    let mut failures = Vec::new();
    for (rep, row) in table.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if let Some(msg) = &c.failure {
                failures.push(CellFailure {
                    n: settings.n_grid[j],
                    replication: rep,
                    message: msg.clone(),
                });
            }
        }
    }
    let mut verdicts = BTreeMap::new();
    let last = dvec[len - 1];
    verdicts.insert("nonincreasing_envelope".to_string(), last <= dvec[0]);
    if let Some(t) = settings.threshold {
        verdicts.insert("final_below_threshold".to_string(), last < t);
    }
    verdicts.insert("all_cells_solved".to_string(), failures.is_empty());
    Ok(ConvergenceReport {
        sample_sizes: settings.n_grid.clone(),
        dvec,
        bl,
        moment_gap: gap,
        verdicts,
        seed: sampler.seed,
        failures,
    })
}

/// Strong-law experiment for an iid sampler: per `n` and replication,
/// `d⃗` from the empirical mean set to the target mean set, reported as the
/// maximum over replications. Solver failures are recorded per cell.
pub fn slln_experiment(
    space: &EuclideanSpace,
    sampler: &SamplerSpec,
    settings: &ExperimentSettings,
) -> Result<ConvergenceReport> {
    settings.validate()?;
    sampler.validate()?;
    check_dims(space, sampler)?;
    let (target, reference) = match &sampler.kind {
        SamplerKind::Iid { distribution, dim } => iid_target(space, distribution, *dim, sampler, settings)?,
        SamplerKind::MarkovChain { .. } => {
            return Err(FrechetError::config(
                "slln_experiment needs an iid sampler; use ergodic_experiment",
            ))
        }
    };
    run_trajectories(space, sampler, settings, &target, &reference)
}

fn reachable(kernel: &[Vec<f64>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; kernel.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(s) = queue.pop_front() {
        for (t, &p) in kernel[s].iter().enumerate() {
            if p > 0.0 && !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Stationary law of the chain restricted to the states reachable from
/// `initial`, which must form one communicating class.
pub fn stationary_distribution(kernel: &[Vec<f64>], initial: usize) -> Result<Vec<f64>> {
    let k = kernel.len();
    if initial >= k {
        return Err(FrechetError::config("initial state out of range"));
    }
    let class: Vec<usize> = reachable(kernel, initial)
        .iter()
        .enumerate()
        .filter(|(_, r)| **r)
        .map(|(i, _)| i)
        .collect();
    for &s in &class {
        let back = reachable(kernel, s);
        if !back[initial] {
            return Err(FrechetError::config(format!(
                "chain is reducible: state {s} is reachable from {initial} but cannot return"
            )));
        }
    }
    let m = class.len();
    // π (P − I) = 0 with one equation replaced by Σ π = 1.
    let mut a = DMatrix::from_fn(m, m, |i, j| kernel[class[j]][class[i]] - if i == j { 1.0 } else { 0.0 });
    for j in 0..m {
        a[(m - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(m);
    b[m - 1] = 1.0;
    let sol = a
        .lu()
        .solve(&b)
        .ok_or_else(|| FrechetError::config("stationary equations are singular"))?;
    let mut pi = vec![0.0; k];
    for (i, &s) in class.iter().enumerate() {
        pi[s] = sol[i].max(0.0);
    }
    let total: f64 = pi.iter().sum();
    Ok(pi.into_iter().map(|v| v / total).collect())
}

/// Ergodic experiment along trajectory prefixes of a finite-state chain;
/// the target is the mean set of the stationary law on the embedded states.
pub fn ergodic_experiment(
    space: &EuclideanSpace,
    markov: &SamplerSpec,
    settings: &ExperimentSettings,
) -> Result<ConvergenceReport> {
    settings.validate()?;
    markov.validate()?;
    check_dims(space, markov)?;
    let SamplerKind::MarkovChain {
        kernel,
        states,
        initial,
    } = &markov.kind
    else {
        return Err(FrechetError::config("ergodic_experiment needs a markov-chain sampler"));
    };
    let pi = stationary_distribution(kernel, *initial)?;
    let law = DiscreteMeasure::from_unnormalized(states.iter().map(|s| s.to_vec()).collect(), pi)?;
    let target = estimate_mean_set(
        space,
        &law,
        settings.p,
        0.0,
        settings.solver,
        settings.grid_step,
        &settings.solver_config,
    )?;
    run_trajectories(space, markov, settings, &target, &law)
}
