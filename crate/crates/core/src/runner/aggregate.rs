use serde::{Deserialize, Serialize};

use super::{RegretTrace, RunError};
use crate::matrix::ArmId;

/// Per-checkpoint mean and standard error over a batch of traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub policy: String,
    pub checkpoints: Vec<u64>,
    pub mean: Vec<f64>,
    /// Sample standard deviation over `sqrt(n)`; zero for a single trace.
    pub stderr: Vec<f64>,
    pub n: usize,
    /// Fraction of traces whose reported winner is a target arm.
    pub winner_rate: f64,
    pub mean_wall_time_secs: f64,
    /// Regret bound evaluated at each checkpoint, when one applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Vec<f64>>,
}

impl AggregateResult {
    /// Equality on everything except the wall-time average.
    pub fn same_statistics(&self, other: &AggregateResult) -> bool {
        let mut a = self.clone();
        a.mean_wall_time_secs = other.mean_wall_time_secs;
        &a == other
    }
}

pub fn aggregate(traces: &[RegretTrace], target_arms: &[ArmId]) -> Result<AggregateResult, RunError> {
    let first = traces.first().ok_or(RunError::NoTraces)?;
    if traces.iter().any(|t| {
        t.checkpoints != first.checkpoints || t.cumulative_regret.len() != first.checkpoints.len()
    }) {
        return Err(RunError::MismatchedCheckpoints);
    }
    let n = traces.len();
    let nf = n as f64;
    let points = first.checkpoints.len();
    let mut mean = Vec::with_capacity(points);
    let mut stderr = Vec::with_capacity(points);
    for c in 0..points {
        let m = traces.iter().map(|t| t.cumulative_regret[c]).sum::<f64>() / nf;
        let se = if n > 1 {
            let var = traces
                .iter()
                .map(|t| (t.cumulative_regret[c] - m).powi(2))
                .sum::<f64>()
                / (nf - 1.0);
            (var / nf).sqrt()
        } else {
            0.0
        };
        mean.push(m);
        stderr.push(se);
    }
    let hits = traces
        .iter()
        .filter(|t| t.reported_winner.is_some_and(|w| target_arms.contains(&w)))
        .count();
    Ok(AggregateResult {
        policy: first.policy.clone(),
        checkpoints: first.checkpoints.clone(),
        mean,
        stderr,
        n,
        winner_rate: hits as f64 / nf,
        mean_wall_time_secs: traces.iter().map(|t| t.wall_time_secs).sum::<f64>() / nf,
        bound: None,
    })
}
