mod commands;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use crate::commands::Outcome;
use crate::config::SCHEMA_VERSION;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Dist,
    Mean,
    Slln,
    Ergodic,
    Ldp,
    Gamma,
    Diag,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Dist => "dist",
            Command::Mean => "mean",
            Command::Slln => "slln",
            Command::Ergodic => "ergodic",
            Command::Ldp => "ldp",
            Command::Gamma => "gamma",
            Command::Diag => "diag",
        }
    }
}

/// Set-valued Fréchet means: distances, mean sets and convergence experiments.
#[derive(Debug, Parser)]
#[command(name = "frechet", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// JSON result path; the CSV is written next to it with a .csv extension.
    #[arg(long)]
    out: PathBuf,
    /// Override a configuration field, e.g. `--set p=1.5` or `--set sampler.seed=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for the random parts of the run.
    #[arg(long)]
    seed: Option<u64>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("FRECHET_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::config(format!("FRECHET_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))
}

fn csv_path(out: &Path) -> PathBuf {
    let csv = out.with_extension("csv");
    if csv == out {
        out.with_extension("csv.csv")
    } else {
        csv
    }
}

fn write(path: &Path, body: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            action: "create",
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, body).map_err(|source| CliError::Io {
        action: "write",
        path: path.to_path_buf(),
        source,
    })
}

fn run_command(cli: &Cli) -> CliResult<Outcome> {
    let mut config = config::load(&cli.config)?;
    for assignment in &cli.overrides {
        config::apply_override(&mut config, assignment)?;
    }
    config::take_version(&mut config)?;
    match cli.command {
        Command::Dist => commands::dist(config),
        Command::Mean => commands::mean(config),
        Command::Slln => commands::slln(config, cli.seed),
        Command::Ergodic => commands::ergodic(config, cli.seed),
        Command::Ldp => commands::ldp(config, cli.seed),
        Command::Gamma => commands::gamma(config, cli.seed),
        Command::Diag => commands::diag(config, cli.seed),
    }
}

fn envelope(command: Command, status: &str, result: Value, seconds: f64) -> Value {
    let finished = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command.name(),
        "status": status,
        "result": result,
        "metadata": { "runtime_seconds": seconds, "finished_unix": finished },
    })
}

fn run(cli: &Cli) -> CliResult<Option<CliError>> {
    configure_threads()?;
    let start = Instant::now();
    let outcome = run_command(cli)?;
    let seconds = start.elapsed().as_secs_f64();
    let status = if outcome.failure.is_some() { "partial" } else { "ok" };
    let doc = envelope(cli.command, status, outcome.result, seconds);
    let text = serde_json::to_string_pretty(&doc).expect("results serialize");
    write(&cli.out, &(text + "\n"))?;
    write(&csv_path(&cli.out), &outcome.csv)?;
    println!("{} ({seconds:.3}s)", outcome.summary);
    Ok(outcome.failure)
}

fn report(err: &CliError) -> ExitCode {
    let doc = json!({ "error": err.kind(), "message": err.to_string(), "exit_code": err.exit_code() });
    eprintln!("{doc}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(partial)) => report(&partial),
        Err(err) => report(&err),
    }
}
