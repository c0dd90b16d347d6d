use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{FrechetError, Result};
use crate::frechet::{relaxed_mean_set, FrechetConfig, MeanSetApprox};
use crate::measure::DiscreteMeasure;
use crate::metric::{CandidateSet, MetricSpace};
use crate::serde_ext;

/// Largest support handled by the simplex search in [`ldp_rate_function`].
pub const MAX_RATE_ATOMS: usize = 4;

/// `Σ ν_i ln(ν_i / μ_i)` for probability vectors, with `0 ln 0 = 0` and
/// `+∞` when `ν` charges an index where `μ` has no mass.
pub fn kl_divergence(nu: &[f64], mu: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in nu.iter().zip(mu) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            total += a * (a / b).ln();
        }
    }
    total.max(0.0)
}

/// Relative entropy `H(ν | μ)` of two finitely supported measures on one space.
/// Atoms are matched with the space's point equality.
pub fn relative_entropy<S: MetricSpace + ?Sized>(
    space: &S,
    nu: &DiscreteMeasure<S::Point>,
    mu: &DiscreteMeasure<S::Point>,
) -> Result<f64> {
    nu.check_in(space)?;
    mu.check_in(space)?;
    let nu = nu.compact(space);
    let mu = mu.compact(space);
    let mut a = Vec::with_capacity(nu.len());
    let mut b = Vec::with_capacity(nu.len());
    for (x, w) in nu.iter() {
        a.push(w);
        b.push(
            mu.iter()
                .find(|(y, _)| space.same_point(x, y))
                .map(|(_, v)| v)
                .unwrap_or(0.0),
        );
    }
    Ok(kl_divergence(&a, &b))
}

/// Compositions of `total` into `parts` nonnegative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Whether the set is exactly `{target}` under the space's point equality.
fn is_singleton_of<S: MetricSpace + ?Sized>(space: &S, set: &[S::Point], target: &S::Point) -> bool {
    !set.is_empty() && set.iter().all(|x| space.same_point(x, target))
}

fn contains<S: MetricSpace + ?Sized>(space: &S, set: &[S::Point], x: &S::Point) -> bool {
    set.iter().any(|y| space.same_point(x, y))
}

/// Grid approximation of `I_{p,μ}(x) = inf { H(ν|μ) : M_p(ν) = {x} }`.
///
/// `ν` runs over measures on the support of `μ` whose weights are multiples
/// of `simplex_step`; each mean set is the exact band over `candidates`.
/// Returns `0` when `x ∈ M_p(μ)` and `+∞` when no grid measure is feasible.
pub fn ldp_rate_function<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    p: f64,
    target: &S::Point,
    simplex_step: f64,
    candidates: &CandidateSet<S::Point>,
) -> Result<f64> {
    space.check_point(target)?;
    let mu = mu.compact(space);
    let k = mu.len();
    if k > MAX_RATE_ATOMS {
        return Err(FrechetError::argument(format!(
            "rate function search supports at most {MAX_RATE_ATOMS} atoms, got {k}"
        )));
    }
    if !(simplex_step > 0.0 && simplex_step <= 1.0) {
        return Err(FrechetError::argument("simplex step must lie in (0, 1]"));
    }
    let config = FrechetConfig::new(p);
    let own = relaxed_mean_set(space, &mu, &config, candidates)?;
    if contains(space, &own.points, target) {
        return Ok(0.0);
    }
    let m = (1.0 / simplex_step).round().max(1.0) as usize;
    let support = mu.support().to_vec();
    let base = mu.weights().to_vec();
    let results: Vec<Result<f64>> = compositions(m, k)
        .into_par_iter()
        .map(|c| {
            let weights: Vec<f64> = c.iter().map(|&v| v as f64 / m as f64).collect();
            let kl = kl_divergence(&weights, &base);
            if !kl.is_finite() {
                return Ok(f64::INFINITY);
            }
            let nu = DiscreteMeasure::from_unnormalized(support.clone(), weights)?;
            let band = relaxed_mean_set(space, &nu, &config, candidates)?;
            Ok(if is_singleton_of(space, &band.points, target) {
                kl
            } else {
                f64::INFINITY
            })
        })
        .collect();
    let mut best = f64::INFINITY;
    for r in results {
        best = best.min(r?);
    }
    Ok(best)
}

/// Event `{M_p(μ̄_n) ⊆ A}` on mean sets.
#[derive(Debug, Clone, PartialEq)]
pub enum MeanSetEvent<P> {
    /// The mean set lies inside the listed points.
    SubsetOf(Vec<P>),
    Everything,
    Nothing,
}

impl<P> MeanSetEvent<P> {
    pub fn holds<S: MetricSpace<Point = P> + ?Sized>(&self, space: &S, set: &[P]) -> bool {
        match self {
            MeanSetEvent::Everything => true,
            MeanSetEvent::Nothing => false,
            MeanSetEvent::SubsetOf(a) => set.iter().all(|x| contains(space, a, x)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LdpMode {
    ExactBinomial,
    MonteCarlo { replications: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdpResult {
    pub n_values: Vec<usize>,
    #[serde(with = "serde_ext::real_vec")]
    pub probabilities: Vec<f64>,
    /// Probability that the empirical mean set has more than one point.
    #[serde(with = "serde_ext::real_vec")]
    pub tie_probabilities: Vec<f64>,
    /// `−(1/n) ln P̂`; `None` marks a censored zero Monte Carlo estimate.
    pub empirical_rates: Vec<Option<f64>>,
    #[serde(with = "serde_ext::real")]
    pub theoretical_rate: f64,
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + values.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
}

fn empirical_rate(prob: f64, n: usize, censor_zero: bool) -> Option<f64> {
    if prob <= 0.0 {
        if censor_zero {
            None
        } else {
            Some(f64::INFINITY)
        }
    } else {
        Some((-(prob.ln()) / n as f64).max(0.0))
    }
}

/// Probabilities of `{M_p(μ̄_n) ∈ A}` along `n_grid` with empirical and
/// theoretical rates.
///
/// Exact mode needs a two-atom `μ` and sums binomial weights in log space
/// over the counts whose mean set satisfies the event. Monte Carlo mode
/// samples `μ̄_n` directly. The theoretical rate is the minimum of
/// [`ldp_rate_function`] over the event's points.
#[allow(clippy::too_many_arguments)]
pub fn ldp_experiment<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    p: f64,
    event: &MeanSetEvent<S::Point>,
    n_grid: &[usize],
    mode: LdpMode,
    candidates: &CandidateSet<S::Point>,
    simplex_step: f64,
) -> Result<LdpResult> {
    mu.check_in(space)?;
    if n_grid.is_empty() || n_grid.contains(&0) {
        return Err(FrechetError::argument(
            "n_grid must be a nonempty list of positive sizes",
        ));
    }
    let mu = mu.compact(space);
    let config = FrechetConfig::new(p);
    let mean_set = |nu: &DiscreteMeasure<S::Point>| -> Result<MeanSetApprox<S::Point>> {
        relaxed_mean_set(space, nu, &config, candidates)
    };
    let mut probabilities = Vec::with_capacity(n_grid.len());
    let mut ties = Vec::with_capacity(n_grid.len());
    let mut rates = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let (prob, tie, censor) = match mode {
            LdpMode::ExactBinomial => {
                if mu.len() != 2 {
                    return Err(FrechetError::argument("exact mode needs a measure with two atoms"));
                }
                let theta = mu.weights()[1];
                let mut hit = Vec::new();
                let mut tied = Vec::new();
                for k in 0..=n {
                    let f = k as f64 / n as f64;
                    let nu = DiscreteMeasure::from_unnormalized(mu.support().to_vec(), vec![1.0 - f, f])?;
                    let set = mean_set(&nu)?;
                    let lw = ln_binomial(n as u64, k as u64)
                        + if k > 0 { k as f64 * theta.ln() } else { 0.0 }
                        + if k < n {
                            (n - k) as f64 * (1.0 - theta).ln()
                        } else {
                            0.0
                        };
                    if event.holds(space, &set.points) {
                        hit.push(lw);
                    }
                    if set.points.len() > 1 {
                        tied.push(lw);
                    }
                }
                (
                    log_sum_exp(&hit).exp().min(1.0),
                    log_sum_exp(&tied).exp().min(1.0),
                    false,
                )
            }
            LdpMode::MonteCarlo { replications, seed } => {
                if replications == 0 {
                    return Err(FrechetError::argument("Monte Carlo mode needs replications"));
                }
                let outcomes: Vec<Result<(bool, bool)>> = (0..replications)
                    .into_par_iter()
                    .map(|rep| {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(rep as u64);
                        let mut counts = vec![0.0; mu.len()];
                        for _ in 0..n {
                            let u = ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
                            let mut acc = 0.0;
                            let mut idx = mu.len() - 1;
                            for (i, w) in mu.weights().iter().enumerate() {
                                acc += w;
                                if u < acc {
                                    idx = i;
                                    break;
                                }
                            }
                            counts[idx] += 1.0;
                        }
                        let nu = DiscreteMeasure::from_unnormalized(mu.support().to_vec(), counts)?;
                        let set = mean_set(&nu)?;
                        Ok((event.holds(space, &set.points), set.points.len() > 1))
                    })
                    .collect();
                let mut hits = 0usize;
                let mut tied = 0usize;
                for o in outcomes {
                    let (h, t) = o?;
                    hits += h as usize;
                    tied += t as usize;
                }
                (
                    hits as f64 / replications as f64,
                    tied as f64 / replications as f64,
                    true,
                )
            }
        };
        probabilities.push(prob);
        ties.push(tie);
        rates.push(empirical_rate(prob, n, censor));
    }
    let theoretical_rate = match event {
        MeanSetEvent::Everything => 0.0,
        MeanSetEvent::Nothing => f64::INFINITY,
        MeanSetEvent::SubsetOf(points) => {
            let mut best = f64::INFINITY;
            for x in points {
                best = best.min(ldp_rate_function(space, &mu, p, x, simplex_step, candidates)?);
            }
            best
        }
    };
    Ok(LdpResult {
        n_values: n_grid.to_vec(),
        probabilities,
        tie_probabilities: ties,
        empirical_rates: rates,
        theoretical_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::support_candidates;
    use crate::spaces::EuclideanSpace;

    fn bernoulli(theta: f64) -> DiscreteMeasure<Vec<f64>> {
        DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], vec![1.0 - theta, theta]).unwrap()
    }

    #[test]
    fn kl_values() {
        assert_eq!(kl_divergence(&[0.3, 0.7], &[0.3, 0.7]), 0.0);
        let v = kl_divergence(&[0.5, 0.5], &[0.7, 0.3]);
        assert!((v - (0.5 * (0.5f64 / 0.3).ln() + 0.5 * (0.5f64 / 0.7).ln())).abs() < 1e-15);
        assert_eq!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]), f64::INFINITY);
    }

    #[test]
    fn relative_entropy_matches_atoms() {
        let line = EuclideanSpace::line();
        let nu = DiscreteMeasure::new(vec![vec![1.0], vec![0.0]], vec![0.5, 0.5]).unwrap();
        let v = relative_entropy(&line, &nu, &bernoulli(0.3)).unwrap();
        assert!((v - kl_divergence(&[0.5, 0.5], &[0.3, 0.7])).abs() < 1e-15);
        let off = DiscreteMeasure::dirac(vec![2.0]);
        assert_eq!(relative_entropy(&line, &off, &bernoulli(0.3)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn rate_function_on_two_points() {
        let line = EuclideanSpace::line();
        let mu = bernoulli(0.3);
        let cands = support_candidates(&line, &mu);
        assert_eq!(
            ldp_rate_function(&line, &mu, 2.0, &vec![0.0], 0.01, &cands).unwrap(),
            0.0
        );
        let r = ldp_rate_function(&line, &mu, 2.0, &vec![1.0], 1e-4, &cands).unwrap();
        assert!((r - kl_divergence(&[0.5, 0.5], &[0.3, 0.7])).abs() < 1e-3);
        assert_eq!(
            ldp_rate_function(&line, &mu, 2.0, &vec![2.0], 0.01, &cands).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn trivial_events() {
        let line = EuclideanSpace::line();
        let mu = bernoulli(0.3);
        let cands = support_candidates(&line, &mu);
        let all = ldp_experiment(
            &line,
            &mu,
            2.0,
            &MeanSetEvent::Everything,
            &[10],
            LdpMode::ExactBinomial,
            &cands,
            0.01,
        )
        .unwrap();
        assert!((all.probabilities[0] - 1.0).abs() < 1e-12);
        assert_eq!(all.theoretical_rate, 0.0);
        let none = ldp_experiment(
            &line,
            &mu,
            2.0,
            &MeanSetEvent::Nothing,
            &[10],
            LdpMode::ExactBinomial,
            &cands,
            0.01,
        )
        .unwrap();
        assert_eq!(none.probabilities[0], 0.0);
        assert_eq!(none.theoretical_rate, f64::INFINITY);
        let mc = ldp_experiment(
            &line,
            &mu,
            2.0,
            &MeanSetEvent::Nothing,
            &[10],
            LdpMode::MonteCarlo {
                replications: 20,
                seed: 1,
            },
            &cands,
            0.01,
        )
        .unwrap();
        assert_eq!(mc.empirical_rates[0], None);
    }
}
