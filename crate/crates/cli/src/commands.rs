//! One function per subcommand: parse the configuration, compute, and return
//! the JSON result, the CSV body and a one-line summary.

use frechet_core::convergence::{
    gamma_convergence_probe, tail_mass_profile, tau_w_r_distance_with, GammaProbeConfig, DEFAULT_TEST_FUNCTIONS,
    DEFAULT_TEST_SEED,
};
use frechet_core::dynamic::{compute_mean_set, default_solver, AnyPoint, AnySpace, MeanRequest};
use frechet_core::serde_ext::csv_real;
use frechet_core::solvers::{SolverConfig, SolverKind};
use frechet_core::stochastics::{
    ergodic_experiment, ldp_experiment, slln_experiment, ExperimentSettings, LdpMode, MeanSetEvent, SamplerKind,
    SamplerSpec,
};
use frechet_core::{CandidateScheme, DiscreteMeasure, FrechetError, MeanSetApprox, MetricSpace};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{parse, reject_leftovers, set_path, take, take_opt};
use crate::error::{CliError, CliResult};

/// What a command produced. `failure` is set when results were written but
/// the run is still reported as failed.
pub struct Outcome {
    pub result: Value,
    pub csv: String,
    pub summary: String,
    pub failure: Option<CliError>,
}

fn real(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(csv_real(v))
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SchemeConfig {
    Support,
    Grid { step: f64 },
    BallGrid { center: Value, radius: f64, step: f64 },
}

impl SchemeConfig {
    fn build(&self, space: &AnySpace) -> CliResult<CandidateScheme<AnyPoint>> {
        Ok(match self {
            SchemeConfig::Support => CandidateScheme::Support,
            SchemeConfig::Grid { step } => CandidateScheme::Grid { step: *step },
            SchemeConfig::BallGrid { center, radius, step } => CandidateScheme::BallGrid {
                center: space.parse_point(center)?,
                radius: *radius,
                step: *step,
            },
        })
    }
}

fn scheme_or(
    config: &mut Value,
    key: &str,
    default: SchemeConfig,
    space: &AnySpace,
) -> CliResult<CandidateScheme<AnyPoint>> {
    let scheme = match take_opt(config, key) {
        Some(v) => parse(key, v)?,
        None => default,
    };
    scheme.build(space)
}

fn opt<T: serde::de::DeserializeOwned>(config: &mut Value, key: &str) -> CliResult<Option<T>> {
    take_opt(config, key).map(|v| parse(key, v)).transpose()
}

fn solver_or(config: &mut Value, space: &AnySpace, p: f64) -> CliResult<SolverKind> {
    match opt::<String>(config, "solver")? {
        Some(name) => name.parse().map_err(CliError::Core),
        None => Ok(default_solver(space, p)),
    }
}

fn solver_config(config: &mut Value) -> CliResult<SolverConfig> {
    let mut sc = SolverConfig::default();
    if let Some(n) = opt::<usize>(config, "max_iterations")? {
        sc.max_iterations = n;
    }
    sc.validate()?;
    Ok(sc)
}

fn mean_set_json(space: &AnySpace, set: &MeanSetApprox<AnyPoint>) -> Value {
    json!({
        "mean_set": set.points.iter().map(|x| space.point_to_json(x)).collect::<Vec<_>>(),
        "resolution": real(set.resolution),
        "achieved_value": real(set.achieved_value),
    })
}

fn quote_csv(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

pub fn dist(mut config: Value) -> CliResult<Outcome> {
    let space = AnySpace::from_json(&take(&mut config, "space")?)?;
    let x = space.parse_point(&take(&mut config, "x")?)?;
    let y = space.parse_point(&take(&mut config, "y")?)?;
    reject_leftovers(&config)?;
    let d = space.try_distance(&x, &y)?;
    Ok(Outcome {
        result: json!({ "distance": real(d) }),
        csv: format!("distance\n{}\n", csv_real(d)),
        summary: format!("dist: {} in {}", csv_real(d), space.describe()),
        failure: None,
    })
}

pub fn mean(mut config: Value) -> CliResult<Outcome> {
    let space = AnySpace::from_json(&take(&mut config, "space")?)?;
    let mu = space.parse_measure(&take(&mut config, "measure")?)?;
    let p: f64 = parse("p", take(&mut config, "p")?)?;
    let epsilon = opt(&mut config, "epsilon")?.unwrap_or(0.0);
    let solver = solver_or(&mut config, &space, p)?;
    let scheme = scheme_or(&mut config, "scheme", SchemeConfig::Grid { step: 0.01 }, &space)?;
    let refine_rounds = opt(&mut config, "refine_rounds")?.unwrap_or(0);
    let origin = take_opt(&mut config, "origin")
        .map(|v| space.parse_point(&v))
        .transpose()?;
    let solver_config = solver_config(&mut config)?;
    reject_leftovers(&config)?;
    let request = MeanRequest {
        p,
        epsilon,
        solver,
        scheme,
        refine_rounds,
        origin,
        solver_config,
    };
    match compute_mean_set(&space, &mu, &request) {
        Ok(set) => {
            let mut result = mean_set_json(&space, &set);
            result["solver"] = json!(solver.name());
            let mut csv = String::from("index,point\n");
            for (i, x) in set.points.iter().enumerate() {
                csv.push_str(&format!("{i},{}\n", quote_csv(&space.point_to_json(x).to_string())));
            }
            let summary = format!(
                "mean: {} point(s) via {solver}, resolution {}, value {}",
                set.points.len(),
                csv_real(set.resolution),
                csv_real(set.achieved_value)
            );
            Ok(Outcome {
                result,
                csv,
                summary,
                failure: None,
            })
        }
        Err(e) => match e.root() {
            FrechetError::NonConvergence {
                last_iterate,
                last_value,
                ..
            } => Ok(Outcome {
                result: json!({
                    "mean_set": [],
                    "solver": solver.name(),
                    "last_iterate": last_iterate.iter().map(|v| real(*v)).collect::<Vec<_>>(),
                    "last_value": real(*last_value),
                }),
                csv: String::from("index,point\n"),
                summary: format!("mean: {solver} did not converge"),
                failure: Some(CliError::Core(e)),
            }),
            _ => Err(e.into()),
        },
    }
}

fn experiment(mut config: Value, seed: Option<u64>, ergodic: bool) -> CliResult<Outcome> {
    let name = if ergodic { "ergodic" } else { "slln" };
    if let Some(s) = seed {
        set_path(&mut config, "sampler.seed", json!(s))?;
    }
    let space = AnySpace::from_json(&take(&mut config, "space")?)?;
    let euclid = *space
        .as_euclidean()
        .ok_or_else(|| CliError::config(format!("{name} needs a real or euclidean space")))?;
    let sampler: SamplerSpec = parse("sampler", take(&mut config, "sampler")?)?;
    match (&sampler.kind, ergodic) {
        (SamplerKind::Iid { .. }, false) | (SamplerKind::MarkovChain { .. }, true) => {}
        (_, false) => return Err(CliError::config("slln needs an iid sampler")),
        (_, true) => return Err(CliError::config("ergodic needs a markov-chain sampler")),
    }
    if sampler.dim() != euclid.dim {
        return Err(CliError::config(format!(
            "sampler produces points of dimension {}, space has dimension {}",
            sampler.dim(),
            euclid.dim
        )));
    }
    let solver_config = solver_config(&mut config)?;
    let mut settings: ExperimentSettings = parse("experiment settings", config)?;
    settings.solver_config = solver_config;
    let report = if ergodic {
        ergodic_experiment(&euclid, &sampler, &settings)?
    } else {
        slln_experiment(&euclid, &sampler, &settings)?
    };
    let failed: Vec<&String> = report.verdicts.iter().filter(|(_, ok)| !**ok).map(|(k, _)| k).collect();
    let summary = format!(
        "{name}: max d = {} at n = {}, {}",
        csv_real(report.final_dvec().unwrap_or(f64::NAN)),
        report.sample_sizes.last().copied().unwrap_or(0),
        if failed.is_empty() {
            "all verdicts hold".to_string()
        } else {
            format!(
                "failed verdicts: {}",
                failed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            )
        }
    );
    let failure = (!report.failures.is_empty()).then(|| {
        CliError::Partial(format!(
            "{} of {} cells failed; first: n = {}: {}",
            report.failures.len(),
            report.sample_sizes.len() * settings.replications,
            report.failures[0].n,
            report.failures[0].message
        ))
    });
    Ok(Outcome {
        csv: report.to_csv(),
        result: serde_json::to_value(&report).expect("reports serialize"),
        summary,
        failure,
    })
}

pub fn slln(config: Value, seed: Option<u64>) -> CliResult<Outcome> {
    experiment(config, seed, false)
}

pub fn ergodic(config: Value, seed: Option<u64>) -> CliResult<Outcome> {
    experiment(config, seed, true)
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum EventConfig {
    SubsetOf { points: Vec<Value> },
    Everything,
    Nothing,
}

pub fn ldp(mut config: Value, seed: Option<u64>) -> CliResult<Outcome> {
    let space = AnySpace::from_json(&take(&mut config, "space")?)?;
    let mu = space.parse_measure(&take(&mut config, "measure")?)?;
    let p: f64 = parse("p", take(&mut config, "p")?)?;
    let event = match parse::<EventConfig>("event", take(&mut config, "event")?)? {
        EventConfig::SubsetOf { points } => {
            MeanSetEvent::SubsetOf(points.iter().map(|v| space.parse_point(v)).collect::<Result<_, _>>()?)
        }
        EventConfig::Everything => MeanSetEvent::Everything,
        EventConfig::Nothing => MeanSetEvent::Nothing,
    };
    let n_grid: Vec<usize> = parse("n_grid", take(&mut config, "n_grid")?)?;
    let mut mode: LdpMode = opt(&mut config, "mode")?.unwrap_or(LdpMode::ExactBinomial);
    if let (Some(s), LdpMode::MonteCarlo { seed: inner, .. }) = (seed, &mut mode) {
        *inner = s;
    }
    let scheme = scheme_or(&mut config, "candidates", SchemeConfig::Support, &space)?;
    let simplex_step: f64 = opt(&mut config, "simplex_step")?.unwrap_or(1e-3);
    reject_leftovers(&config)?;
    let candidates = space.candidates(&mu, &scheme)?;
    let res = ldp_experiment(&space, &mu, p, &event, &n_grid, mode, &candidates, simplex_step)?;
    let mut csv = String::from("n,probability,tie_probability,empirical_rate\n");
    for i in 0..res.n_values.len() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            res.n_values[i],
            csv_real(res.probabilities[i]),
            csv_real(res.tie_probabilities[i]),
            res.empirical_rates[i].map(csv_real).unwrap_or_default()
        ));
    }
    let last = res.empirical_rates.last().copied().flatten();
    let summary = format!(
        "ldp: empirical rate {} at n = {}, theoretical rate {}",
        last.map(csv_real).unwrap_or_else(|| "censored".into()),
        res.n_values.last().copied().unwrap_or(0),
        csv_real(res.theoretical_rate)
    );
    Ok(Outcome {
        result: serde_json::to_value(&res).expect("results serialize"),
        csv,
        summary,
        failure: None,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceItem {
    n: usize,
    measure: Value,
    #[serde(default)]
    epsilon: f64,
}

pub fn gamma(mut config: Value, seed: Option<u64>) -> CliResult<Outcome> {
    let space = AnySpace::from_json(&take(&mut config, "space")?)?;
    let p: f64 = parse("p", take(&mut config, "p")?)?;
    let items: Vec<SequenceItem> = parse("sequence", take(&mut config, "sequence")?)?;
    let limit_measure = space.parse_measure(&take(&mut config, "limit")?)?;
    let scheme = scheme_or(&mut config, "scheme", SchemeConfig::Grid { step: 0.01 }, &space)?;
    let solver = match opt::<String>(&mut config, "solver")? {
        Some(name) => name.parse()?,
        None => SolverKind::Grid,
    };
    let refine_rounds = opt(&mut config, "refine_rounds")?.unwrap_or(0);
    let stored_seed: Option<u64> = opt(&mut config, "seed")?;
    let probe = GammaProbeConfig {
        solver_tolerance: opt(&mut config, "solver_tolerance")?.unwrap_or(1e-6),
        seed: seed.or(stored_seed).unwrap_or(0),
    };
    let solver_config = solver_config(&mut config)?;
    reject_leftovers(&config)?;
    if items.is_empty() {
        return Err(CliError::config("sequence must not be empty"));
    }
    let sizes: Vec<usize> = items.iter().map(|i| i.n).collect();
    let eps: Vec<f64> = items.iter().map(|i| i.epsilon).collect();
    let measures = items
        .iter()
        .map(|i| space.parse_measure(&i.measure))
        .collect::<Result<Vec<DiscreteMeasure<AnyPoint>>, _>>()?;
    let request = |epsilon: f64, solver: SolverKind| MeanRequest {
        p,
        epsilon,
        solver,
        scheme: scheme.clone(),
        refine_rounds,
        origin: None,
        solver_config,
    };
    let limit = compute_mean_set(&space, &limit_measure, &request(0.0, SolverKind::Grid))?;
    let report = gamma_convergence_probe(
        &space,
        &sizes,
        &measures,
        &limit_measure,
        &limit,
        p,
        &eps,
        &probe,
        |mu, cfg| compute_mean_set(&space, mu, &request(cfg.epsilon, solver)),
    )?;
    let mut result = serde_json::to_value(&report).expect("reports serialize");
    result["limit"] = mean_set_json(&space, &limit);
    let failed = report.verdicts.values().filter(|ok| !**ok).count();
    let summary = format!(
        "gamma: d from {} to {} over {} sizes, {} of {} verdicts hold",
        csv_real(report.dvec[0]),
        csv_real(*report.dvec.last().unwrap()),
        sizes.len(),
        report.verdicts.len() - failed,
        report.verdicts.len()
    );
    Ok(Outcome {
        csv: report.to_csv(),
        result,
        summary,
        failure: None,
    })
}

pub fn diag(mut config: Value, seed: Option<u64>) -> CliResult<Outcome> {
    let space = AnySpace::from_json(&take(&mut config, "space")?)?;
    let raw: Vec<Value> = parse("measures", take(&mut config, "measures")?)?;
    let measures = raw
        .iter()
        .map(|m| space.parse_measure(m))
        .collect::<Result<Vec<_>, _>>()?;
    if measures.is_empty() {
        return Err(CliError::config("measures must not be empty"));
    }
    let reference = take_opt(&mut config, "reference")
        .map(|m| space.parse_measure(&m))
        .transpose()?;
    let origin = match take_opt(&mut config, "origin") {
        Some(v) => space.parse_point(&v)?,
        None => measures[0].first_atom().clone(),
    };
    let radii: Vec<f64> = parse("radii", take(&mut config, "radii")?)?;
    let r: f64 = opt(&mut config, "r")?.unwrap_or(1.0);
    let tests: usize = opt(&mut config, "tests")?.unwrap_or(DEFAULT_TEST_FUNCTIONS);
    let stored_seed: Option<u64> = opt(&mut config, "seed")?;
    let seed = seed.or(stored_seed).unwrap_or(DEFAULT_TEST_SEED);
    reject_leftovers(&config)?;
    let tails = tail_mass_profile(&space, &measures, &origin, &radii, r)?;
    let tau = match &reference {
        Some(nu) => measures
            .iter()
            .map(|mu| tau_w_r_distance_with(&space, mu, nu, r, tests, seed))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let mut csv = String::from("measure,radius,mass,weighted\n");
    for (i, (mass, weighted)) in tails.mass.iter().zip(&tails.weighted).enumerate() {
        for (j, l) in tails.radii.iter().enumerate() {
            csv.push_str(&format!(
                "{i},{},{},{}\n",
                csv_real(*l),
                csv_real(mass[j]),
                csv_real(weighted[j])
            ));
        }
    }
    let summary = format!(
        "diag: tail profile of {} measure(s) over {} radii{}",
        measures.len(),
        radii.len(),
        tau.last()
            .map(|t| format!(
                ", last bl = {}, moment gap = {}",
                csv_real(t.bl),
                csv_real(t.moment_gap)
            ))
            .unwrap_or_default()
    );
    Ok(Outcome {
        result: json!({ "tails": tails, "tau": tau }),
        csv,
        summary,
        failure: None,
    })
}
