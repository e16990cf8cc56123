//! MergeDTS: divide-and-conquer elimination with double Thompson sampling.
//!
//! Arms are split into small batches that are visited round-robin. On each
//! visit the batch is purged of arms that lose to a batchmate even under an
//! optimistic (UCB) estimate; a first arm is then drawn by a sampled
//! Copeland tournament and a second arm by sampling which batchmate is most
//! likely to lose to it. When half of the previous stage's arms are gone,
//! the batches are regrouped. Once a single arm remains the policy duels it
//! against itself.
//!
//! Two conventions worth knowing when reading traces:
//! - batch `m` at step `t` is `(t - 1) mod b` over 0-indexed batches;
//! - the purge at step `t` uses the UCBs computed at the start of that step,
//!   before any merge, and the tournaments run on the merged batch.

mod batches;
mod tournaments;
mod ucb;

pub use batches::{BatchEpoch, BatchSet, BatchedElimination, PairCount, Scheduled};
pub use tournaments::{relative_tournament, sample_tournament};
pub use ucb::{log_term, purge_batch, ucb_matrix, ucb_value};

use serde::{Deserialize, Serialize};

use crate::counts::ComparisonCounts;
use crate::matrix::ArmId;
use crate::policy::{DuelChoice, DuelPolicy, PolicyError};
use crate::sampling::DuelRng;
use crate::theory::exploration_constant;

/// Parameters of a merge-family policy.
///
/// The exploration constant comes either from `c_override` or from the
/// closed form at failure probability `epsilon` (default `1 / horizon`),
/// never both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergeDtsParams {
    pub alpha: f64,
    pub batch_size: usize,
    pub horizon: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_override: Option<f64>,
}

impl MergeDtsParams {
    /// Theory-regime defaults: `alpha = 1.01`, `M = 4`, `epsilon = 1 / T`.
    pub fn theoretical(horizon: u64) -> Self {
        Self {
            alpha: 1.01,
            batch_size: 4,
            horizon,
            epsilon: None,
            c_override: None,
        }
    }

    /// Empirically tuned values: `alpha = 0.8^6`, `M = 16`, `C = 4e6`.
    pub fn tuned(horizon: u64) -> Self {
        Self {
            alpha: 0.8f64.powi(6),
            batch_size: 16,
            horizon,
            epsilon: None,
            c_override: Some(4_000_000.0),
        }
    }

    /// Validates the parameters and returns the exploration constant to use.
    pub fn resolve_constant(&self, k: usize) -> Result<f64, PolicyError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(PolicyError::BadParams(format!("alpha = {} must be > 0", self.alpha)));
        }
        if self.batch_size < 2 {
            return Err(PolicyError::BadParams(format!(
                "batch size {} must be >= 2",
                self.batch_size
            )));
        }
        if self.horizon == 0 {
            return Err(PolicyError::BadParams("horizon must be >= 1".into()));
        }
        match (self.c_override, self.epsilon) {
            (Some(_), Some(_)) => Err(PolicyError::BadParams(
                "give either epsilon or c_override, not both".into(),
            )),
            (Some(c), None) => {
                if c > 0.0 && c.is_finite() {
                    Ok(c)
                } else {
                    Err(PolicyError::BadParams(format!("c_override = {c} must be > 0")))
                }
            }
            (None, eps) => {
                let eps = eps.unwrap_or(1.0 / self.horizon as f64);
                if !(eps > 0.0 && eps < 1.0) && !(eps == 1.0 && self.horizon == 1) {
                    return Err(PolicyError::BadParams(format!("epsilon = {eps} not in (0, 1)")));
                }
                exploration_constant(self.alpha, k, eps).map_err(|e| {
                    PolicyError::BadParams(format!("{e}; supply c_override to run outside that regime"))
                })
            }
        }
    }
}

/// The MergeDTS policy state. Serializes to JSON for checkpointing; the RNG
/// is owned by the caller and is not part of the state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeDts {
    params: MergeDtsParams,
    core: BatchedElimination,
}

impl MergeDts {
    pub fn new(k: usize, params: MergeDtsParams) -> Result<Self, PolicyError> {
        if k == 0 {
            return Err(PolicyError::BadParams("need at least one arm".into()));
        }
        let c = params.resolve_constant(k)?;
        let core = BatchedElimination::new(k, params.batch_size, params.alpha, c);
        Ok(Self { params, core })
    }

    pub fn params(&self) -> &MergeDtsParams {
        &self.params
    }

    /// The exploration constant in use.
    pub fn c_const(&self) -> f64 {
        self.core.c_const()
    }

    pub fn counts(&self) -> &ComparisonCounts {
        self.core.counts()
    }

    pub fn batch_set(&self) -> BatchSet {
        self.core.batch_set()
    }

    pub fn stage(&self) -> u32 {
        self.core.stage()
    }

    pub fn machinery(&self) -> &BatchedElimination {
        &self.core
    }

    /// Chooses the duel for step `steps() + 1`.
    pub fn select_pair(&mut self, rng: &mut DuelRng) -> DuelChoice {
        match self.core.schedule() {
            Scheduled::Finished(arm) => DuelChoice::new(arm, arm, 0),
            Scheduled::Batch(m) => {
                let batch = self.core.batch(m);
                let w = self.core.counts();
                let first = sample_tournament(w, batch, rng);
                let second = relative_tournament(w, batch, first, rng);
                DuelChoice::new(first, second, m)
            }
        }
    }

    /// Feeds back the winner and applies the stage transition if due.
    /// Returns whether the stage advanced.
    pub fn record_outcome(&mut self, choice: &DuelChoice, winner: ArmId) -> Result<bool, PolicyError> {
        choice.check_range(self.core.k())?;
        let loser = choice.loser(winner)?;
        Ok(self.core.record(choice.batch_index, winner, loser))
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("policy state serializes")
    }
}

impl DuelPolicy for MergeDts {
    fn name(&self) -> &'static str {
        "merge_dts"
    }

    fn num_arms(&self) -> usize {
        self.core.k()
    }

    fn steps(&self) -> u64 {
        self.core.steps()
    }

    fn select(&mut self, rng: &mut DuelRng) -> DuelChoice {
        self.select_pair(rng)
    }

    fn record(&mut self, choice: &DuelChoice, winner: ArmId) -> Result<(), PolicyError> {
        self.record_outcome(choice, winner).map(|_| ())
    }

    fn winner(&self) -> Option<ArmId> {
        self.core.winner()
    }

    fn batch_epochs(&self) -> Option<Vec<BatchEpoch>> {
        Some(self.core.epochs().to_vec())
    }

    fn snapshot(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("policy state serializes")
    }
}
