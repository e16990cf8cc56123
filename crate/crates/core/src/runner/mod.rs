//! Seeded experiment orchestration.
//!
//! A run drives one policy against one environment for `horizon` steps:
//! select a pair, sample the duel, feed back the winner, add the step's
//! regret. Each run seeds two independent generators from its seed, one for
//! the policy and one for the environment. Runs of a batch use seeds
//! `base_seed, base_seed + 1, ...` and share nothing, so they execute on a
//! worker pool and come back ordered by seed.

mod aggregate;
mod audit;
mod config;
mod export;

pub use aggregate::{aggregate, AggregateResult};
pub use audit::{audit_epochs, lemma1_audit, AuditReport, PairViolation};
pub use config::{default_checkpoints, RunConfig, DEFAULT_CHECKPOINTS};
pub use export::{parse_aggregate_csv, read_aggregate_csv, rows_to_csv, write_aggregate_csv, AggregateRow};

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environments::{EnvError, Environment, RegretMode};
use crate::matrix::ArmId;
use crate::mergedts::BatchEpoch;
use crate::policy::{DuelChoice, DuelPolicy, PolicyError};
use crate::sampling::{stream_rng, Stream};
use crate::theory::bound_with_constant;
use crate::winners::gap_summary;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("environment: {0}")]
    Env(EnvError),
    #[error("policy: {0}")]
    Policy(#[from] PolicyError),
    #[error("regret mode is incompatible with this environment: {0}")]
    IncompatibleRegretMode(String),
    #[error("traces do not share the same checkpoints")]
    MismatchedCheckpoints,
    #[error("no traces to aggregate")]
    NoTraces,
    #[error("audit needs a merge-family policy trace with batch epochs")]
    NotMergePolicy,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(String),
}

impl From<EnvError> for RunError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::NoCondorcetWinner => RunError::IncompatibleRegretMode(e.to_string()),
            other => RunError::Env(other),
        }
    }
}

/// Result of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub policy: String,
    pub seed: u64,
    pub checkpoints: Vec<u64>,
    pub cumulative_regret: Vec<f64>,
    /// Duels between two distinct arms.
    pub duels_recorded: u64,
    /// First step after which the policy had committed to a single arm.
    pub finished_at: Option<u64>,
    pub reported_winner: Option<ArmId>,
    pub wall_time_secs: f64,
    /// Batch lifetimes with per-pair duel counts (merge-family policies).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_epochs: Option<Vec<BatchEpoch>>,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.cumulative_regret.last().copied().unwrap_or(0.0)
    }

    /// Equality on everything except the measured wall time.
    pub fn same_outcome(&self, other: &RegretTrace) -> bool {
        let mut a = self.clone();
        a.wall_time_secs = other.wall_time_secs;
        &a == other
    }
}

/// A batch of runs. Failed runs are listed instead of aborting the batch.
#[derive(Debug, Clone)]
pub struct BatchOutcome {
    pub traces: Vec<RegretTrace>,
    pub failures: Vec<(u64, String)>,
}

/// Drives `policy` against `env` for `horizon` steps. `on_duel` sees every
/// choice and the sampled winner.
pub fn drive(
    env: &Environment,
    policy: &mut dyn DuelPolicy,
    horizon: u64,
    checkpoints: &[u64],
    seed: u64,
    mut on_duel: impl FnMut(&DuelChoice, ArmId),
) -> Result<RegretTrace, RunError> {
    let mut policy_rng = stream_rng(seed, Stream::Policy);
    let mut env_rng = stream_rng(seed, Stream::Environment);
    let start = Instant::now();
    let mut cumulative = 0.0;
    let mut recorded = Vec::with_capacity(checkpoints.len());
    let mut next_cp = checkpoints.iter().copied().peekable();
    let mut duels = 0u64;
    let mut finished_at = None;
    for t in 1..=horizon {
        let choice = policy.select(&mut policy_rng);
        let winner = env.duel(choice.first, choice.second, &mut env_rng);
        policy.record(&choice, winner)?;
        on_duel(&choice, winner);
        cumulative += env.step_regret(choice.first, choice.second);
        if !choice.is_self_duel {
            duels += 1;
        }
        if finished_at.is_none() && policy.winner().is_some() {
            finished_at = Some(t);
        }
        if next_cp.peek() == Some(&t) {
            recorded.push(cumulative);
            next_cp.next();
        }
    }
    Ok(RegretTrace {
        policy: policy.name().to_string(),
        seed,
        checkpoints: checkpoints.to_vec(),
        cumulative_regret: recorded,
        duels_recorded: duels,
        finished_at,
        reported_winner: policy.recommendation(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        batch_epochs: policy.batch_epochs(),
    })
}

fn run_in(config: &RunConfig, env: &Environment, checkpoints: &[u64], seed: u64) -> Result<RegretTrace, RunError> {
    let mut policy = config.policy.build(env.k(), config.horizon)?;
    drive(env, policy.as_mut(), config.horizon, checkpoints, seed, |_, _| {})
}

/// One seeded run of `config`.
pub fn run_single(config: &RunConfig, seed: u64) -> Result<RegretTrace, RunError> {
    config.validate()?;
    let env = config.environment.realize(config.base_dir.as_deref())?;
    run_in(config, &env, &config.resolved_checkpoints(), seed)
}

/// Like [`run_single`], also returning every `(first, second)` pair played.
pub fn run_single_logged(
    config: &RunConfig,
    seed: u64,
) -> Result<(RegretTrace, Vec<(ArmId, ArmId)>), RunError> {
    config.validate()?;
    let env = config.environment.realize(config.base_dir.as_deref())?;
    let mut policy = config.policy.build(env.k(), config.horizon)?;
    let mut log = Vec::with_capacity(config.horizon as usize);
    let trace = drive(
        &env,
        policy.as_mut(),
        config.horizon,
        &config.resolved_checkpoints(),
        seed,
        |c, _| log.push((c.first, c.second)),
    )?;
    Ok((trace, log))
}

/// Runs every seed of `config` on a pool of `config.parallelism` workers.
/// Output is ordered by seed regardless of completion order.
pub fn run_batch(config: &RunConfig) -> Result<BatchOutcome, RunError> {
    use rayon::prelude::*;

    config.validate()?;
    let env = config.environment.realize(config.base_dir.as_deref())?;
    let checkpoints = config.resolved_checkpoints();
    let seeds: Vec<u64> = config.seeds().collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| RunError::Config(format!("worker pool: {e}")))?;
    let results: Vec<(u64, Result<RegretTrace, RunError>)> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| (seed, run_in(config, &env, &checkpoints, seed)))
            .collect()
    });
    let mut traces = Vec::new();
    let mut failures = Vec::new();
    for (seed, r) in results {
        match r {
            Ok(t) => traces.push(t),
            Err(e) => {
                log::warn!("run with seed {seed} failed: {e}");
                failures.push((seed, e.to_string()));
            }
        }
    }
    Ok(BatchOutcome { traces, failures })
}

/// Regret bound `8 a M K ln(t + C) / gap^2` at each checkpoint, for
/// merge-family policies in the regime where it holds (`alpha > 0.5`,
/// `M >= 4`, a Condorcet environment with a positive minimum gap).
pub fn bound_curve(config: &RunConfig, env: &Environment, checkpoints: &[u64]) -> Option<Vec<f64>> {
    let params = config.policy.merge_params(config.horizon).ok()??;
    if !(params.alpha > 0.5) || params.batch_size < 4 || env.mode() != RegretMode::Condorcet {
        return None;
    }
    let c = params.resolve_constant(env.k()).ok()?;
    let gap = gap_summary(env.matrix()).delta_min?;
    Some(
        checkpoints
            .iter()
            .map(|&t| bound_with_constant(params.alpha, params.batch_size, env.k(), t as f64, c, gap))
            .collect(),
    )
}

/// Aggregates traces produced from `config`: winner rate against the
/// environment's target arms, plus the bound curve when one applies.
pub fn summarize(config: &RunConfig, traces: &[RegretTrace]) -> Result<AggregateResult, RunError> {
    let env = config.environment.realize(config.base_dir.as_deref())?;
    let mut agg = aggregate(traces, &env.target_arms())?;
    agg.bound = bound_curve(config, &env, &agg.checkpoints);
    Ok(agg)
}
