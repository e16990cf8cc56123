//! Command implementations behind the `duelbench` binary. Each command is a
//! plain function so it can be driven from tests without a subprocess.

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod plot;

use std::fs;
use std::path::{Path, PathBuf};

use duelbench::environments::{gen_cycle, gen_cycle2, gen_random_condorcet, MatrixSource};
use duelbench::matrix::MatrixError;
use duelbench::runner::{run_batch, summarize, RegretTrace, RunConfig, RunError};
use duelbench::theory::{bound_with_constant, exploration_constant, pair_comparison_bound};
use duelbench::winners::winner_report;
use duelbench::PreferenceMatrix;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Every error maps to a category printed as `ERROR: <category>: <message>`.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Matrix(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Run(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Matrix(_) => "matrix",
            CliError::Input(_) => "input",
            CliError::Run(_) => "run",
            CliError::Usage(_) => "usage",
        }
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(m) => CliError::Config(m),
            RunError::Policy(p) => CliError::Config(p.to_string()),
            RunError::Io(io) => CliError::Io(io.to_string()),
            RunError::Csv(m) => CliError::Input(m),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        CliError::Matrix(e.to_string())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub seeds: Vec<u64>,
    pub failures: Vec<(u64, String)>,
    pub horizon: u64,
    pub policy: String,
    pub versions: Versions,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub duelbench: &'static str,
    pub duelbench_cli: &'static str,
}

pub fn trace_file_name(seed: u64) -> String {
    format!("trace_seed_{seed}.json")
}

/// Runs every seed of the config at `config_path` and writes traces, the
/// aggregate (CSV and JSON), a copy of the config and a manifest into
/// `out_dir`. A non-empty `out_dir` is refused unless `force` is set.
pub fn cmd_run(
    config_path: &Path,
    out_dir: &Path,
    jobs: Option<usize>,
    force: bool,
) -> Result<Manifest, CliError> {
    let raw = fs::read(config_path)
        .map_err(|e| CliError::Config(format!("{}: {e}", config_path.display())))?;
    let mut config = RunConfig::load(config_path).map_err(|e| match e {
        RunError::Io(io) => CliError::Config(format!("{}: {io}", config_path.display())),
        other => CliError::from(other),
    })?;
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be >= 1".into()));
        }
        config.parallelism = j;
    }
    if out_dir.exists() {
        let occupied = fs::read_dir(out_dir)
            .map_err(|e| io_err(out_dir, e))?
            .next()
            .is_some();
        if occupied && !force {
            return Err(CliError::Io(format!(
                "{} already exists and is not empty; pass --force to overwrite",
                out_dir.display()
            )));
        }
    }
    let traces_dir = out_dir.join("traces");
    fs::create_dir_all(&traces_dir).map_err(|e| io_err(&traces_dir, e))?;

    log::info!(
        "running {} seeds of {} steps on {} worker(s)",
        config.repeats,
        config.horizon,
        config.parallelism
    );
    let outcome = run_batch(&config)?;
    for (seed, msg) in &outcome.failures {
        log::error!("seed {seed} failed: {msg}");
    }
    for trace in &outcome.traces {
        let path = traces_dir.join(trace_file_name(trace.seed));
        trace.save_json(&path).map_err(|e| io_err(&path, e))?;
    }
    if outcome.traces.is_empty() {
        return Err(CliError::Run("every run failed".into()));
    }
    let agg = summarize(&config, &outcome.traces)?;
    write_file(&out_dir.join("aggregate.csv"), &agg.to_csv_string())?;
    let agg_json = out_dir.join("aggregate.json");
    agg.save_json(&agg_json).map_err(|e| io_err(&agg_json, e))?;
    write_file(&out_dir.join("config.json"), &portable_config(&config)?)?;

    let manifest = Manifest {
        config_sha256: hex(&Sha256::digest(&raw)),
        seeds: config.seeds().collect(),
        failures: outcome.failures,
        horizon: config.horizon,
        policy: agg.policy.clone(),
        versions: Versions {
            duelbench: duelbench::VERSION,
            duelbench_cli: env!("CARGO_PKG_VERSION"),
        },
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&out_dir.join("manifest.json"), &text)?;
    Ok(manifest)
}

/// The config as JSON with a relative matrix path made absolute, so the
/// copy stays usable from the output directory.
fn portable_config(config: &RunConfig) -> Result<String, CliError> {
    let mut copy = config.clone();
    if let MatrixSource::File { path } = &mut copy.environment.source {
        if path.is_relative() {
            let joined = config.base_dir.as_deref().unwrap_or(Path::new(".")).join(&*path);
            *path = fs::canonicalize(&joined).map_err(|e| io_err(&joined, e))?;
        }
    }
    Ok(serde_json::to_string_pretty(&copy).expect("config serializes"))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GenKind {
    Cycle,
    Cycle2,
    RandomCondorcet,
}

#[derive(Debug, Clone)]
pub struct GenParams {
    pub k: Option<usize>,
    pub delta_min: Option<f64>,
    pub uninformative_fraction: f64,
    pub seed: u64,
}

/// Writes a generated matrix; `.json` paths get JSON, anything else CSV.
pub fn cmd_gen(kind: GenKind, out: &Path, params: &GenParams) -> Result<PreferenceMatrix, CliError> {
    let m = match kind {
        GenKind::Cycle | GenKind::Cycle2 => {
            if params.k.is_some() || params.delta_min.is_some() {
                return Err(CliError::Usage(
                    "--k and --delta-min only apply to random-condorcet".into(),
                ));
            }
            if kind == GenKind::Cycle {
                gen_cycle()
            } else {
                gen_cycle2()
            }
        }
        GenKind::RandomCondorcet => {
            let k = params
                .k
                .ok_or_else(|| CliError::Usage("random-condorcet needs --k".into()))?;
            let delta = params
                .delta_min
                .ok_or_else(|| CliError::Usage("random-condorcet needs --delta-min".into()))?;
            gen_random_condorcet(k, delta, params.uninformative_fraction, params.seed)
                .map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    m.save(out)?;
    Ok(m)
}

/// Validates a matrix file and renders its winner report: a per-arm CSV
/// block (`arm,borda,copeland`) followed by `#`-prefixed summary lines.
pub fn cmd_validate(path: &Path) -> Result<String, CliError> {
    let m = PreferenceMatrix::load(path)?;
    let report = winner_report(&m);
    let mut out = String::from("arm,borda,copeland\n");
    for (i, (b, c)) in report
        .borda_scores
        .iter()
        .zip(&report.copeland_scores)
        .enumerate()
    {
        out.push_str(&format!("{i},{},{}\n", round12(*b), round12(*c)));
    }
    out.push_str(&format!("# k = {}\n", m.k()));
    match report.condorcet {
        Some(c) => out.push_str(&format!("# condorcet winner: {c}\n")),
        None => out.push_str("# condorcet winner: none\n"),
    }
    let winners: Vec<String> = report.copeland_winners.iter().map(|a| a.to_string()).collect();
    out.push_str(&format!("# copeland winners: {}\n", winners.join(" ")));
    for w in &report.warnings {
        out.push_str(&format!("# warning: {w}\n"));
    }
    Ok(out)
}

/// Rounds to 12 significant digits to hide float noise in printed scores.
fn round12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundArgs {
    pub alpha: f64,
    pub batch_size: usize,
    pub k: usize,
    pub horizon: u64,
    pub epsilon: Option<f64>,
    pub c_const: Option<f64>,
    pub delta_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub exploration_constant: f64,
    pub regret_bound: f64,
    pub pair_comparison_bound: f64,
}

/// Evaluates the regret bound and the per-batch pair bound. The pair bound
/// uses `delta_min` as the batch gap.
pub fn cmd_bound(args: &BoundArgs) -> Result<BoundReport, CliError> {
    let usage = |e: duelbench::theory::TheoryError| CliError::Usage(e.to_string());
    if args.batch_size < 4 {
        return Err(CliError::Usage("the bound needs --batch-size >= 4".into()));
    }
    if !(args.delta_min > 0.0) {
        return Err(CliError::Usage("--delta-min must be > 0".into()));
    }
    let c = match (args.epsilon, args.c_const) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give --epsilon or --c, not both".into())),
        (None, Some(c)) if c > 0.0 => c,
        (None, Some(c)) => return Err(CliError::Usage(format!("--c {c} must be > 0"))),
        (eps, None) => {
            let eps = eps.unwrap_or(1.0 / args.horizon.max(1) as f64);
            exploration_constant(args.alpha, args.k, eps).map_err(usage)?
        }
    };
    let horizon = args.horizon as f64;
    Ok(BoundReport {
        exploration_constant: c,
        regret_bound: bound_with_constant(args.alpha, args.batch_size, args.k, horizon, c, args.delta_min),
        pair_comparison_bound: pair_comparison_bound(args.alpha, horizon, c, args.delta_min).map_err(usage)?,
    })
}

/// Reads every `trace_*.json` in `trace_dir` and writes their aggregate to
/// `out` (JSON for `.json`, CSV otherwise). The config that produced the
/// traces is taken from `config`, or from a `config.json` next to or one
/// level above `trace_dir`.
pub fn cmd_summarize(trace_dir: &Path, out: &Path, config: Option<&Path>) -> Result<usize, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(trace_dir)
        .map_err(|e| io_err(trace_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("trace_"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Input(format!("no trace_*.json files in {}", trace_dir.display())));
    }
    let mut traces = Vec::with_capacity(paths.len());
    for p in &paths {
        traces.push(RegretTrace::load_json(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?);
    }
    traces.sort_by_key(|t| t.seed);

    let config_path = match config {
        Some(p) => p.to_path_buf(),
        None => [trace_dir.join("config.json"), trace_dir.join("../config.json")]
            .into_iter()
            .find(|p| p.exists())
            .ok_or_else(|| {
                CliError::Config(format!(
                    "no config.json found near {}; pass --config",
                    trace_dir.display()
                ))
            })?,
    };
    let cfg = RunConfig::load(&config_path).map_err(|e| match e {
        RunError::Io(io) => CliError::Config(format!("{}: {io}", config_path.display())),
        other => CliError::from(other),
    })?;
    let agg = summarize(&cfg, &traces)?;
    if out.extension().is_some_and(|x| x == "json") {
        agg.save_json(out).map_err(|e| io_err(out, e))?;
    } else {
        write_file(out, &agg.to_csv_string())?;
    }
    Ok(traces.len())
}
