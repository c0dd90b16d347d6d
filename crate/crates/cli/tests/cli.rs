use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use frechet_core::convergence::ConvergenceReport;
use frechet_core::stochastics::LdpResult;
use serde_json::{json, Value};
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn frechet(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_frechet"));
    cmd.args(args).env_remove("FRECHET_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

struct Run {
    output: Output,
    json: Option<Value>,
    csv: Option<String>,
}

fn run_with(command: &str, config: &Path, extra: &[&str], envs: &[(&str, &str)]) -> (Run, TempDir) {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("result.json");
    let mut args = vec![
        command,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let output = frechet(&args, envs);
    let json = std::fs::read_to_string(&out)
        .ok()
        .map(|t| serde_json::from_str(&t).expect("result is JSON"));
    let csv = std::fs::read_to_string(dir.path().join("result.csv")).ok();
    (Run { output, json, csv }, dir)
}

fn run(command: &str, config: &str, extra: &[&str]) -> Run {
    run_with(command, &configs().join(config), extra, &[]).0
}

fn write_config(dir: &TempDir, value: &Value) -> PathBuf {
    let path = dir.path().join("config.json");
    std::fs::write(&path, value.to_string()).unwrap();
    path
}

fn stderr_json(output: &Output) -> Value {
    let text = String::from_utf8_lossy(&output.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("stderr is not JSON: {text}"))
}

fn assert_ok(r: &Run) -> &Value {
    assert!(
        r.output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&r.output.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&r.output.stdout).lines().count(), 1);
    let doc = r.json.as_ref().unwrap();
    assert_eq!(doc["schema_version"], json!(1));
    assert_eq!(doc["status"], json!("ok"));
    &doc["result"]
}

#[test]
fn mean_of_three_reals() {
    let r = run("mean", "mean_real.json", &[]);
    let result = assert_ok(&r);
    assert_eq!(result["mean_set"], json!([2.0]));
    assert_eq!(result["resolution"], json!(0.0));
    assert!(String::from_utf8_lossy(&r.output.stdout).starts_with("mean:"));
}

#[test]
fn median_interval_on_a_grid() {
    let r = run("mean", "mean_median_interval.json", &[]);
    let result = assert_ok(&r);
    let xs: Vec<f64> = result["mean_set"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!(xs.iter().all(|x| (0.0..=1.0).contains(x)));
    assert!(xs.contains(&0.0) && xs.contains(&1.0));
    assert_eq!(r.csv.unwrap().lines().count(), xs.len() + 1);
}

#[test]
fn bures_barycenter_of_commuting_matrices() {
    let r = run("mean", "mean_bures.json", &[]);
    let m = &assert_ok(&r)["mean_set"][0];
    for (i, j, want) in [(0, 0, 2.25), (0, 1, 0.0), (1, 0, 0.0), (1, 1, 2.25)] {
        assert!((m[i][j].as_f64().unwrap() - want).abs() < 1e-8);
    }
}

#[test]
fn diagram_distance() {
    let r = run("dist", "dist_diagrams.json", &[]);
    let d = assert_ok(&r)["distance"].as_f64().unwrap();
    assert!((d - std::f64::consts::SQRT_2).abs() < 1e-12);
    assert!(r.csv.unwrap().starts_with("distance\n1.41421356"));
}

#[test]
fn slln_normal_final_row_below_threshold() {
    let r = run("slln", "slln_normal.json", &[]);
    let result = assert_ok(&r).clone();
    let csv = r.csv.unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,dvec,bl,moment_gap"));
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "10000");
    assert!(last[1].parse::<f64>().unwrap() < 0.05);
    let report: ConvergenceReport = serde_json::from_value(result).unwrap();
    assert!(report.verdicts.values().all(|v| *v));
}

#[test]
fn reruns_are_byte_identical_and_seeds_matter() {
    let args = ["--set", "replications=3", "--set", "n_grid=[50,500]"];
    let a = run("slln", "slln_normal.json", &args);
    let b = run("slln", "slln_normal.json", &args);
    assert_ok(&a);
    assert_eq!(a.csv, b.csv);
    assert_eq!(a.json.as_ref().unwrap()["result"], b.json.as_ref().unwrap()["result"]);
    let mut seeded = args.to_vec();
    seeded.extend(["--seed", "99"]);
    let c = run("slln", "slln_normal.json", &seeded);
    assert_ok(&c);
    assert_ne!(a.csv, c.csv);
}

#[test]
fn cauchy_median_and_ergodic_chain() {
    for (cmd, cfg) in [("slln", "slln_cauchy.json"), ("ergodic", "ergodic_two_state.json")] {
        let r = run(cmd, cfg, &[]);
        let report: ConvergenceReport = serde_json::from_value(assert_ok(&r).clone()).unwrap();
        assert!(report.final_dvec().unwrap() < 0.05, "{cmd}: {:?}", report.dvec);
    }
}

#[test]
fn ldp_rates_approach_the_relative_entropy() {
    let r = run("ldp", "ldp_bernoulli.json", &[]);
    let res: LdpResult = serde_json::from_value(assert_ok(&r).clone()).unwrap();
    let kl = 0.5 * (0.5f64 / 0.3).ln() + 0.5 * (0.5f64 / 0.7).ln();
    assert!((res.theoretical_rate - kl).abs() < 1e-3);
    let last = res.empirical_rates.last().unwrap().unwrap();
    assert!((last - kl).abs() < 0.2 * kl);
    assert_eq!(r.csv.unwrap().lines().count(), 5);
}

#[test]
fn ldp_monte_carlo_censors_zero_estimates() {
    let mc = r#"mode={"kind":"monte-carlo","replications":100,"seed":1}"#;
    let r = run(
        "ldp",
        "ldp_bernoulli.json",
        &["--set", mc, "--set", "simplex_step=0.01"],
    );
    let res: LdpResult = serde_json::from_value(assert_ok(&r).clone()).unwrap();
    assert_eq!(res.empirical_rates[3], None);
    assert!(r.csv.unwrap().lines().last().unwrap().ends_with(','));
}

#[test]
fn gamma_probe_and_diagnostics() {
    let r = run("gamma", "gamma_shrinking_gap.json", &[]);
    let result = assert_ok(&r).clone();
    assert_eq!(result["limit"]["mean_set"], json!([0.5]));
    let report: ConvergenceReport = serde_json::from_value(result).unwrap();
    assert!(report.verdicts.values().all(|v| *v));
    assert!(report.dvec.windows(2).all(|w| w[1] <= w[0]));

    let r = run("diag", "diag_tails.json", &[]);
    let result = assert_ok(&r);
    assert_eq!(result["tails"]["mass"][0], json!([0.75, 0.5, 0.5, 0.25]));
    assert_eq!(result["tau"][1], json!({"bl": 0.0, "moment_gap": 0.0}));
    assert_eq!(r.csv.unwrap().lines().count(), 9);
}

#[test]
fn configuration_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cases = [
        json!({"space": {"kind": "real"}, "measure": {"support": [1]}, "p": 2}),
        json!({"schema_version": 1, "space": {"kind": "real"}, "measure": {"support": [1]}, "p": 2, "typo": 1}),
        json!({"schema_version": 1, "space": {"kind": "plane"}, "measure": {"support": [1]}, "p": 2}),
        json!({"schema_version": 1, "space": {"kind": "real"}, "measure": {"support": [1]}, "p": 0.5}),
        json!({"schema_version": 1, "space": {"kind": "euclidean", "dim": 2}, "measure": {"support": [[1, 2, 3]]}, "p": 2}),
    ];
    for config in cases {
        let path = write_config(&dir, &config);
        let (r, _d) = run_with("mean", &path, &[], &[]);
        assert_eq!(r.output.status.code(), Some(2), "{config}");
        let err = stderr_json(&r.output);
        assert_eq!(err["exit_code"], json!(2));
        assert!(err["message"].as_str().unwrap().len() > 3);
    }
    let r = run("mean", "mean_real.json", &["--set", "novalue"]);
    assert_eq!(r.output.status.code(), Some(2));
    let r = run("slln", "slln_normal.json", &["--set", "sampler.distribution.sd=-1"]);
    assert_eq!(r.output.status.code(), Some(2));
    let r = run("ergodic", "slln_normal.json", &[]);
    assert_eq!(r.output.status.code(), Some(2));
    let (r, _d) = run_with(
        "mean",
        &configs().join("mean_real.json"),
        &[],
        &[("FRECHET_THREADS", "0")],
    );
    assert_eq!(r.output.status.code(), Some(2));
}

#[test]
fn thread_cap_is_honored() {
    let (r, _d) = run_with(
        "ergodic",
        &configs().join("ergodic_two_state.json"),
        &[],
        &[("FRECHET_THREADS", "1")],
    );
    assert_ok(&r);
}

#[test]
fn non_convergence_exits_3_with_partial_results() {
    let dir = TempDir::new().unwrap();
    let config = json!({
        "schema_version": 1,
        "space": {"kind": "euclidean", "dim": 2},
        "measure": {"support": [[0, 0], [3, 0], [0, 4], [5, 5], [-2, 1]]},
        "p": 1,
        "solver": "weiszfeld",
        "max_iterations": 1
    });
    let path = write_config(&dir, &config);
    let (r, _d) = run_with("mean", &path, &[], &[]);
    assert_eq!(r.output.status.code(), Some(3));
    assert_eq!(stderr_json(&r.output)["error"], json!("non_convergence"));
    let doc = r.json.unwrap();
    assert_eq!(doc["status"], json!("partial"));
    assert_eq!(doc["result"]["last_iterate"].as_array().unwrap().len(), 2);
}

#[test]
fn io_errors_exit_4() {
    let r = run("mean", "does_not_exist.json", &[]);
    assert_eq!(r.output.status.code(), Some(4));
    assert_eq!(stderr_json(&r.output)["error"], json!("io"));

    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = blocker.join("result.json");
    let config = configs().join("mean_real.json");
    let output = frechet(
        &[
            "mean",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(output.status.code(), Some(4));
}
