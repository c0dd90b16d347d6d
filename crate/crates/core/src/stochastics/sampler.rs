use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{FrechetError, Result};
use crate::measure::DiscreteMeasure;

/// Tolerance on the row sums of a transition kernel and on finite probability vectors.
pub const KERNEL_TOLERANCE: f64 = 1e-9;

/// A point given either as a scalar or as a coordinate vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl PointSpec {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            PointSpec::Scalar(v) => vec![*v],
            PointSpec::Vector(v) => v.clone(),
        }
    }
}

/// Named one-dimensional laws; vector samples use independent coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    Constant {
        value: f64,
    },
    Normal {
        mean: f64,
        sd: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    Pareto {
        alpha: f64,
        x_min: f64,
    },
    Cauchy {
        loc: f64,
        scale: f64,
    },
    /// Law on `{0, 1}` with `P(1) = theta`.
    Bernoulli {
        theta: f64,
    },
    Finite {
        values: Vec<f64>,
        probs: Vec<f64>,
    },
}

fn check_probabilities(probs: &[f64]) -> Result<()> {
    if probs.is_empty() || probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(FrechetError::config("probabilities must be finite and nonnegative"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > KERNEL_TOLERANCE {
        return Err(FrechetError::config(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Index drawn from a probability vector by inverse CDF.
fn categorical(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Distribution::Constant { value } => value.is_finite(),
            Distribution::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && *sd > 0.0,
            Distribution::Uniform { low, high } => low.is_finite() && high.is_finite() && low < high,
            Distribution::Pareto { alpha, x_min } => {
                alpha.is_finite() && *alpha > 0.0 && x_min.is_finite() && *x_min > 0.0
            }
            Distribution::Cauchy { loc, scale } => loc.is_finite() && scale.is_finite() && *scale > 0.0,
            Distribution::Bernoulli { theta } => (0.0..=1.0).contains(theta),
            Distribution::Finite { values, probs } => {
                if values.len() != probs.len() || values.iter().any(|v| !v.is_finite()) {
                    return Err(FrechetError::config(
                        "finite law needs one finite value per probability",
                    ));
                }
                check_probabilities(probs)?;
                true
            }
        };
        if ok {
            Ok(())
        } else {
            Err(FrechetError::config(format!("invalid parameters for {self:?}")))
        }
    }

    /// Inverse CDF at `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Distribution::Constant { value } => *value,
            Distribution::Normal { mean, sd } => Normal::new(*mean, *sd).map(|n| n.inverse_cdf(u)).unwrap_or(f64::NAN),
            Distribution::Uniform { low, high } => low + (high - low) * u,
            Distribution::Pareto { alpha, x_min } => x_min * (1.0 - u).powf(-1.0 / alpha),
            Distribution::Cauchy { loc, scale } => loc + scale * (std::f64::consts::PI * (u - 0.5)).tan(),
            Distribution::Bernoulli { theta } => {
                if u < 1.0 - theta {
                    0.0
                } else {
                    1.0
                }
            }
            Distribution::Finite { values, probs } => values[categorical(probs, u)],
        }
    }

    /// Minimizer of `x ↦ E|x − Y|^p` when it is unique and known in closed form.
    pub fn analytic_minimizer(&self, p: f64) -> Option<f64> {
        match self {
            Distribution::Constant { value } => Some(*value),
            Distribution::Normal { mean, .. } => Some(*mean),
            Distribution::Uniform { low, high } => Some(0.5 * (low + high)),
            Distribution::Cauchy { loc, .. } if p < 2.0 => Some(*loc),
            Distribution::Pareto { alpha, x_min } if p == 2.0 && *alpha > 1.0 => Some(alpha * x_min / (alpha - 1.0)),
            Distribution::Pareto { alpha, x_min } if p == 1.0 => Some(x_min * 2f64.powf(1.0 / alpha)),
            _ => None,
        }
    }

    /// Finitely supported law, for laws that are finite.
    pub fn finite_law(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Distribution::Constant { value } => Some((vec![*value], vec![1.0])),
            Distribution::Bernoulli { theta } => Some((vec![0.0, 1.0], vec![1.0 - theta, *theta])),
            Distribution::Finite { values, probs } => Some((values.clone(), probs.clone())),
            _ => None,
        }
    }
}

/// Stationary sources of points in `ℝ^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SamplerKind {
    Iid {
        distribution: Distribution,
        #[serde(default = "default_dim")]
        dim: usize,
    },
    /// Finite-state chain; state `s` is embedded as the point `states[s]`.
    MarkovChain {
        kernel: Vec<Vec<f64>>,
        states: Vec<PointSpec>,
        #[serde(default)]
        initial: usize,
    },
}

fn default_dim() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    #[serde(flatten)]
    pub kind: SamplerKind,
    #[serde(default)]
    pub seed: u64,
}

/// Uniform draw in the open interval `(0, 1)` from the top 53 bits.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

impl SamplerSpec {
    pub fn iid(distribution: Distribution, seed: u64) -> Self {
        Self {
            kind: SamplerKind::Iid { distribution, dim: 1 },
            seed,
        }
    }

    pub fn markov(kernel: Vec<Vec<f64>>, states: Vec<f64>, initial: usize, seed: u64) -> Self {
        Self {
            kind: SamplerKind::MarkovChain {
                kernel,
                states: states.into_iter().map(PointSpec::Scalar).collect(),
                initial,
            },
            seed,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SamplerKind::Iid { dim, .. } => *dim,
            SamplerKind::MarkovChain { states, .. } => states.first().map(|s| s.to_vec().len()).unwrap_or(0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            SamplerKind::Iid { distribution, dim } => {
                if *dim == 0 {
                    return Err(FrechetError::config("sampler dimension must be positive"));
                }
                distribution.validate()
            }
            SamplerKind::MarkovChain {
                kernel,
                states,
                initial,
            } => {
                let k = states.len();
                if k == 0 || kernel.len() != k || kernel.iter().any(|row| row.len() != k) {
                    return Err(FrechetError::config("kernel must be square with one row per state"));
                }
                for (i, row) in kernel.iter().enumerate() {
                    check_probabilities(row).map_err(|e| FrechetError::config(format!("kernel row {i}: {e}")))?;
                }
                if *initial >= k {
                    return Err(FrechetError::config("initial state out of range"));
                }
                let dim = states[0].to_vec().len();
                if dim == 0
                    || states
                        .iter()
                        .any(|s| s.to_vec().len() != dim || s.to_vec().iter().any(|v| !v.is_finite()))
                {
                    return Err(FrechetError::config("states must be finite points of one dimension"));
                }
                Ok(())
            }
        }
    }

    /// The first `n` points of replication `replication`. Each replication is
    /// an independent ChaCha8 stream of the seed, so prefixes are consistent.
    pub fn sample_path(&self, n: usize, replication: u64) -> Result<Vec<Vec<f64>>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replication);
        Ok(match &self.kind {
            SamplerKind::Iid { distribution, dim } => (0..n)
                .map(|_| (0..*dim).map(|_| distribution.quantile(open_unit(&mut rng))).collect())
                .collect(),
            SamplerKind::MarkovChain {
                kernel,
                states,
                initial,
            } => {
                let mut s = *initial;
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    out.push(states[s].to_vec());
                    s = categorical(&kernel[s], open_unit(&mut rng));
                }
                out
            }
        })
    }
}

/// Uniform-weight empirical measure of the first `n` sampled points.
pub fn sample_empirical(sampler: &SamplerSpec, n: usize) -> Result<DiscreteMeasure<Vec<f64>>> {
    sample_empirical_replication(sampler, n, 0)
}

pub fn sample_empirical_replication(
    sampler: &SamplerSpec,
    n: usize,
    replication: u64,
) -> Result<DiscreteMeasure<Vec<f64>>> {
    if n == 0 {
        return Err(FrechetError::argument("sample size must be at least 1"));
    }
    DiscreteMeasure::uniform(sampler.sample_path(n, replication)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_law_repeats_its_value() {
        let s = SamplerSpec::iid(Distribution::Constant { value: 2.5 }, 1);
        let mu = sample_empirical(&s, 5).unwrap();
        assert!(mu.support().iter().all(|x| x == &vec![2.5]));
    }

    #[test]
    fn identity_kernel_is_absorbing() {
        let s = SamplerSpec::markov(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 3.0], 1, 9);
        let path = s.sample_path(50, 0).unwrap();
        assert!(path.iter().all(|x| x == &vec![3.0]));
    }

    #[test]
    fn same_seed_same_stream_and_prefixes_agree() {
        let s = SamplerSpec::iid(Distribution::Normal { mean: 0.0, sd: 1.0 }, 42);
        let a = s.sample_path(100, 3).unwrap();
        let b = s.sample_path(40, 3).unwrap();
        assert_eq!(&a[..40], &b[..]);
        assert_ne!(s.sample_path(40, 4).unwrap(), b);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Distribution::Normal { mean: 0.0, sd: -1.0 }.validate().is_err());
        let bad = SamplerSpec::markov(vec![vec![0.5, 0.4], vec![0.0, 1.0]], vec![0.0, 1.0], 0, 0);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn json_shape() {
        let s: SamplerSpec = serde_json::from_str(
            r#"{"kind":"iid","distribution":{"family":"pareto","alpha":1.5,"x_min":1.0},"seed":3}"#,
        )
        .unwrap();
        assert_eq!(s.seed, 3);
        assert_eq!(s.dim(), 1);
        let m: SamplerSpec =
            serde_json::from_str(r#"{"kind":"markov-chain","kernel":[[0.4,0.6],[0.6,0.4]],"states":[0,3]}"#).unwrap();
        assert_eq!(m.dim(), 1);
        assert!(m.validate().is_ok());
    }

    #[test]
    fn heavy_tail_quantiles() {
        let p = Distribution::Pareto { alpha: 2.0, x_min: 1.0 };
        assert!((p.quantile(0.75) - 2.0).abs() < 1e-12);
        let c = Distribution::Cauchy { loc: 0.0, scale: 1.0 };
        assert!((c.quantile(0.75) - 1.0).abs() < 1e-12);
    }
}
