//! One-sided Hausdorff distances between finite point sets, a proxy for the
//! weak-plus-moment topology on measures, tail diagnostics, and probes of
//! mean-set convergence along sequences of measures.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FrechetError, Result};
use crate::frechet::{moment, FrechetConfig, MeanSetApprox};
use crate::measure::{compensated_sum, DiscreteMeasure};
use crate::metric::MetricSpace;
use crate::serde_ext::{self, csv_real};

/// Slack for the triangle inequality of `d⃗`.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;
/// Number of distance-field test functions in the bounded-Lipschitz proxy.
pub const DEFAULT_TEST_FUNCTIONS: usize = 64;
/// Seed of the test-function family when none is given.
pub const DEFAULT_TEST_SEED: u64 = 0x5eed;

/// `d⃗(S, S′) = max_{x∈S} min_{x′∈S′} d(x, x′)`; zero exactly when `S ⊆ S′`.
pub fn one_sided_hausdorff<S: MetricSpace + ?Sized>(space: &S, s: &[S::Point], t: &[S::Point]) -> Result<f64> {
    if s.is_empty() || t.is_empty() {
        return Err(FrechetError::argument(
            "one-sided Hausdorff distance needs nonempty sets",
        ));
    }
    let mut worst: f64 = 0.0;
    for x in s {
        let mut best = f64::INFINITY;
        for y in t {
            best = best.min(space.try_distance(x, y)?);
            if best == 0.0 {
                break;
            }
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Whether `d⃗(S,S″) ≤ d⃗(S,S′) + d⃗(S′,S″)` within [`TRIANGLE_TOLERANCE`].
pub fn triangle_check_dvec<S: MetricSpace + ?Sized>(
    space: &S,
    s: &[S::Point],
    t: &[S::Point],
    u: &[S::Point],
) -> Result<bool> {
    let direct = one_sided_hausdorff(space, s, u)?;
    let via = one_sided_hausdorff(space, s, t)? + one_sided_hausdorff(space, t, u)?;
    Ok(direct <= via + TRIANGLE_TOLERANCE * (1.0 + via))
}

/// Checks the basis construction for `d⃗`-balls `B⃗_r(S) = {S′ : d⃗(S′,S) < r}`.
///
/// If `S` lies in `B⃗_{r1}(S1) ∩ B⃗_{r2}(S2)`, sets `r = min(r1 − d⃗(S,S1), r2 − d⃗(S,S2))`
/// and verifies that every sampled set in `B⃗_r(S)` lies in both balls. Returns
/// `None` when `S` is not in the intersection.
pub fn basis_property_holds<S: MetricSpace + ?Sized>(
    space: &S,
    s: &[S::Point],
    ball1: (&[S::Point], f64),
    ball2: (&[S::Point], f64),
    samples: &[Vec<S::Point>],
) -> Result<Option<bool>> {
    let (s1, r1) = ball1;
    let (s2, r2) = ball2;
    let d1 = one_sided_hausdorff(space, s, s1)?;
    let d2 = one_sided_hausdorff(space, s, s2)?;
    if !(d1 < r1 && d2 < r2) {
        return Ok(None);
    }
    let r = (r1 - d1).min(r2 - d2);
    for t in samples {
        if one_sided_hausdorff(space, t, s)? < r
            && !(one_sided_hausdorff(space, t, s1)? < r1 + TRIANGLE_TOLERANCE
                && one_sided_hausdorff(space, t, s2)? < r2 + TRIANGLE_TOLERANCE)
        {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

/// Proxy distances between two finitely supported measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauDistance {
    /// Largest `|∫f dμ − ∫f dν|` over the sampled test functions.
    pub bl: f64,
    /// `|∫d^r(o,y) dμ − ∫d^r(o,y) dν|` at the first atom `o` of `μ`.
    pub moment_gap: f64,
}

/// [`tau_w_r_distance_with`] using the default test family.
pub fn tau_w_r_distance<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    nu: &DiscreteMeasure<S::Point>,
    r: f64,
) -> Result<TauDistance> {
    tau_w_r_distance_with(space, mu, nu, r, DEFAULT_TEST_FUNCTIONS, DEFAULT_TEST_SEED)
}

/// Bounded-Lipschitz proxy over the test functions `y ↦ clamp(a − d(y, z), −1, 1)`
/// with anchors `z` drawn from the union of the supports, together with the
/// `r`-th moment gap at the default origin.
pub fn tau_w_r_distance_with<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    nu: &DiscreteMeasure<S::Point>,
    r: f64,
    tests: usize,
    seed: u64,
) -> Result<TauDistance> {
    mu.check_in(space)?;
    nu.check_in(space)?;
    if !(r >= 0.0) {
        return Err(FrechetError::argument("moment order must be nonnegative"));
    }
    let origin = mu.first_atom();
    let moment_gap = (moment(space, mu, r, origin)? - moment(space, nu, r, origin)?).abs();
    let pool: Vec<&S::Point> = mu.support().iter().chain(nu.support()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<(usize, f64)> = (0..tests)
        .map(|_| {
            let z = rng.gen_range(0..pool.len());
            let w = rng.gen_range(0..pool.len());
            let jitter: f64 = rng.gen_range(-1.0..1.0);
            (z, space.distance(pool[z], pool[w]) + jitter)
        })
        .collect();
    let integral = |m: &DiscreteMeasure<S::Point>, z: &S::Point, a: f64| {
        compensated_sum(m.iter().map(|(y, w)| w * (a - space.distance(y, z)).clamp(-1.0, 1.0)))
    };
    let bl = specs
        .par_iter()
        .map(|&(z, a)| (integral(mu, pool[z], a) - integral(nu, pool[z], a)).abs())
        .reduce(|| 0.0, f64::max);
    Ok(TauDistance { bl, moment_gap })
}

/// Tail masses `μ_n({y : d(o,y) ≥ L})` and `r`-weighted tails
/// `∫_{d(o,y) ≥ L} d^r(o,y) dμ_n(y)`, one row per measure and one column per `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailProfile {
    #[serde(with = "serde_ext::real_vec")]
    pub radii: Vec<f64>,
    #[serde(with = "serde_ext::real_matrix")]
    pub mass: Vec<Vec<f64>>,
    #[serde(with = "serde_ext::real_matrix")]
    pub weighted: Vec<Vec<f64>>,
}

pub fn tail_mass_profile<S: MetricSpace + ?Sized>(
    space: &S,
    mu_sequence: &[DiscreteMeasure<S::Point>],
    origin: &S::Point,
    radii: &[f64],
    r: f64,
) -> Result<TailProfile> {
    space.check_point(origin)?;
    if radii.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(FrechetError::argument("tail radii must be finite and nonnegative"));
    }
    let mut mass = Vec::with_capacity(mu_sequence.len());
    let mut weighted = Vec::with_capacity(mu_sequence.len());
    for mu in mu_sequence {
        mu.check_in(space)?;
        let dists: Vec<(f64, f64)> = mu.iter().map(|(y, w)| (space.distance(origin, y), w)).collect();
        mass.push(
            radii
                .iter()
                .map(|&l| compensated_sum(dists.iter().filter(|(d, _)| *d >= l).map(|(_, w)| *w)))
                .collect(),
        );
        weighted.push(
            radii
                .iter()
                .map(|&l| {
                    compensated_sum(
                        dists
                            .iter()
                            .filter(|(d, _)| *d >= l)
                            .map(|(d, w)| w * crate::frechet::pow_distance(*d, r)),
                    )
                })
                .collect(),
        );
    }
    Ok(TailProfile {
        radii: radii.to_vec(),
        mass,
        weighted,
    })
}

/// A solver failure that did not stop an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub n: usize,
    pub replication: usize,
    pub message: String,
}

/// Per-sample-size convergence record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub sample_sizes: Vec<usize>,
    #[serde(with = "serde_ext::real_vec")]
    pub dvec: Vec<f64>,
    #[serde(with = "serde_ext::real_vec")]
    pub bl: Vec<f64>,
    #[serde(with = "serde_ext::real_vec")]
    pub moment_gap: Vec<f64>,
    pub verdicts: BTreeMap<String, bool>,
    pub seed: u64,
    #[serde(default)]
    pub failures: Vec<CellFailure>,
}

impl ConvergenceReport {
    pub fn validate(&self) -> Result<()> {
        let n = self.sample_sizes.len();
        if self.dvec.len() != n || self.bl.len() != n || self.moment_gap.len() != n {
            return Err(FrechetError::argument("report sequences must share one length"));
        }
        Ok(())
    }

    /// `n,dvec,bl,moment_gap` rows; identical inputs give identical bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,dvec,bl,moment_gap\n");
        for i in 0..self.sample_sizes.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                self.sample_sizes[i],
                csv_real(self.dvec[i]),
                csv_real(self.bl[i]),
                csv_real(self.moment_gap[i])
            );
        }
        out
    }

    pub fn final_dvec(&self) -> Option<f64> {
        self.dvec.last().copied()
    }
}

/// Settings for [`gamma_convergence_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct GammaProbeConfig {
    /// Added to the resolutions of the selected sets and the limit set when judging convergence.
    pub solver_tolerance: f64,
    pub seed: u64,
}

impl Default for GammaProbeConfig {
    fn default() -> Self {
        Self {
            solver_tolerance: 1e-6,
            seed: 0,
        }
    }
}

/// Probes mean-set convergence along `μ_n → μ`.
///
/// For each `n`, `select` returns an approximation of `M_p(μ_n; ε_n)`; the
/// report records `d⃗` from it to `limit` (an approximation of `M_p(μ)`), and
/// the proxy distances between `μ_n` and `μ` with moment order `p − 1`.
///
/// Verdicts:
/// - `final_within_resolution`: the last `d⃗` is at most the combined
///   resolution of the two sets plus the solver tolerance;
/// - `nonincreasing_envelope`: the last `d⃗` does not exceed the first.
#[allow(clippy::too_many_arguments)]
pub fn gamma_convergence_probe<S, F>(
    space: &S,
    sample_sizes: &[usize],
    mu_sequence: &[DiscreteMeasure<S::Point>],
    mu_limit: &DiscreteMeasure<S::Point>,
    limit: &MeanSetApprox<S::Point>,
    p: f64,
    eps_sequence: &[f64],
    config: &GammaProbeConfig,
    select: F,
) -> Result<ConvergenceReport>
where
    S: MetricSpace + ?Sized,
    F: Fn(&DiscreteMeasure<S::Point>, &FrechetConfig<S::Point>) -> Result<MeanSetApprox<S::Point>> + Sync,
{
    let len = sample_sizes.len();
    if len == 0 || mu_sequence.len() != len || eps_sequence.len() != len {
        return Err(FrechetError::argument(
            "sample sizes, measures and tolerances must be nonempty and of equal length",
        ));
    }
    if eps_sequence.iter().any(|e| !(*e >= 0.0)) {
        return Err(FrechetError::argument("tolerances must be nonnegative"));
    }
    if limit.points.is_empty() {
        return Err(FrechetError::argument("limit mean set is empty"));
    }
    let rows: Vec<Result<(f64, f64, TauDistance)>> = (0..len)
        .into_par_iter()
        .map(|i| {
            let n = sample_sizes[i];
            let run = || -> Result<(f64, f64, TauDistance)> {
                let cfg = FrechetConfig::new(p).with_epsilon(eps_sequence[i]);
                let selected = select(&mu_sequence[i], &cfg)?;
                let dvec = one_sided_hausdorff(space, &selected.points, &limit.points)?;
                let tau = tau_w_r_distance_with(
                    space,
                    &mu_sequence[i],
                    mu_limit,
                    (p - 1.0).max(0.0),
                    DEFAULT_TEST_FUNCTIONS,
                    config.seed,
                )?;
                Ok((dvec, selected.resolution, tau))
            };
            run().map_err(|e| e.at_sample(n))
        })
        .collect();
    let mut dvec = Vec::with_capacity(len);
    let mut bl = Vec::with_capacity(len);
    let mut gap = Vec::with_capacity(len);
    let mut last_resolution = 0.0;
    for row in rows {
        let (d, res, tau) = row?;
        dvec.push(d);
        bl.push(tau.bl);
        gap.push(tau.moment_gap);
        last_resolution = res;
    }
    let combined = limit.resolution + last_resolution + config.solver_tolerance;
    let mut verdicts = BTreeMap::new();
    verdicts.insert("final_within_resolution".to_string(), dvec[len - 1] <= combined);
    verdicts.insert(
        "nonincreasing_envelope".to_string(),
        dvec[len - 1] <= dvec[0] + config.solver_tolerance,
    );
    Ok(ConvergenceReport {
        sample_sizes: sample_sizes.to_vec(),
        dvec,
        bl,
        moment_gap: gap,
        verdicts,
        seed: config.seed,
        failures: Vec::new(),
    })
}
