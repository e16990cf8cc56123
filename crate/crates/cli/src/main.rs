use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use duelbench_cli::plot::cmd_plot;
use duelbench_cli::{
    cmd_bound, cmd_gen, cmd_run, cmd_summarize, cmd_validate, BoundArgs, CliError, GenKind, GenParams,
};

/// Dueling-bandit benchmark: run experiments, generate and check preference
/// matrices, evaluate regret bounds and plot regret curves.
///
/// Set DUELBENCH_LOG=error|info|debug to control logging.
#[derive(Parser)]
#[command(name = "duelbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of a JSON config and write traces, aggregates and a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; overrides the config's parallelism.
        #[arg(long)]
        jobs: Option<usize>,
        /// Write into a non-empty output directory.
        #[arg(long)]
        force: bool,
    },
    /// Generate a preference matrix (CSV, or JSON for a .json path).
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        delta_min: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        uninformative_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a matrix file and print Borda/Copeland scores and winners.
    Validate { matrix: PathBuf },
    /// Evaluate the exploration constant, regret bound and pair bound.
    Bound {
        #[arg(long, default_value_t = 1.01)]
        alpha: f64,
        #[arg(long, default_value_t = 4)]
        batch_size: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        horizon: u64,
        /// Failure probability; defaults to 1/horizon.
        #[arg(long, conflicts_with = "c")]
        epsilon: Option<f64>,
        /// Explicit exploration constant.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        delta_min: f64,
    },
    /// Aggregate a directory of trace JSONs.
    Summarize {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Config that produced the traces; found next to them by default.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Render aggregate CSVs as an SVG regret chart plus a points CSV.
    Plot {
        #[arg(required = true)]
        aggregates: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, out, jobs, force } => {
            let m = cmd_run(&config, &out, jobs, force)?;
            println!(
                "wrote {} traces to {} ({} failed)",
                m.seeds.len() - m.failures.len(),
                out.display(),
                m.failures.len()
            );
        }
        Command::Gen { kind, out, k, delta_min, uninformative_fraction, seed } => {
            let params = GenParams { k, delta_min, uninformative_fraction, seed };
            let m = cmd_gen(kind, &out, &params)?;
            println!("wrote {}x{} matrix to {}", m.k(), m.k(), out.display());
        }
        Command::Validate { matrix } => print!("{}", cmd_validate(&matrix)?),
        Command::Bound { alpha, batch_size, k, horizon, epsilon, c, delta_min } => {
            let r = cmd_bound(&BoundArgs {
                alpha,
                batch_size,
                k,
                horizon,
                epsilon,
                c_const: c,
                delta_min,
            })?;
            println!("exploration_constant = {}", r.exploration_constant);
            println!("regret_bound = {}", r.regret_bound);
            println!("pair_comparison_bound = {}", r.pair_comparison_bound);
        }
        Command::Summarize { traces, out, config } => {
            let n = cmd_summarize(&traces, &out, config.as_deref())?;
            println!("aggregated {n} traces into {}", out.display());
        }
        Command::Plot { aggregates, out } => {
            cmd_plot(&aggregates, &out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DUELBENCH_LOG", "warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("ERROR: {}: {msg}", e.category());
            ExitCode::from(2)
        }
    }
}
