//! The interface every dueling-bandit policy implements.
//!
//! A policy alternates between [`DuelPolicy::select`], which proposes a pair
//! of arms for step `t`, and [`DuelPolicy::record`], which feeds back the
//! observed winner. The step counter lives inside the policy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::ArmId;
use crate::mergedts::BatchEpoch;
use crate::sampling::DuelRng;

#[derive(Debug, Error, PartialEq)]
pub enum PolicyError {
    #[error("invalid policy parameters: {0}")]
    BadParams(String),
    #[error("winner {winner} is not part of the duel ({first}, {second})")]
    WinnerNotInPair {
        winner: ArmId,
        first: ArmId,
        second: ArmId,
    },
    #[error("arm {arm} out of range for K = {k}")]
    ArmOutOfRange { arm: ArmId, k: usize },
}

/// The pair chosen at one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuelChoice {
    pub first: ArmId,
    pub second: ArmId,
    /// Batch the pair was drawn from; always 0 for policies without batches.
    pub batch_index: usize,
    pub is_self_duel: bool,
}

impl DuelChoice {
    pub fn new(first: ArmId, second: ArmId, batch_index: usize) -> Self {
        Self {
            first,
            second,
            batch_index,
            is_self_duel: first == second,
        }
    }

    /// Checks that `winner` took part in this duel and returns the loser.
    pub fn loser(&self, winner: ArmId) -> Result<ArmId, PolicyError> {
        if winner == self.first {
            Ok(self.second)
        } else if winner == self.second {
            Ok(self.first)
        } else {
            Err(PolicyError::WinnerNotInPair {
                winner,
                first: self.first,
                second: self.second,
            })
        }
    }

    pub(crate) fn check_range(&self, k: usize) -> Result<(), PolicyError> {
        for arm in [self.first, self.second] {
            if arm.0 >= k {
                return Err(PolicyError::ArmOutOfRange { arm, k });
            }
        }
        Ok(())
    }
}

pub trait DuelPolicy: Send {
    /// Short identifier, matching the `kind` used in policy specs.
    fn name(&self) -> &'static str;

    fn num_arms(&self) -> usize;

    /// Number of completed select/record cycles.
    fn steps(&self) -> u64;

    /// Proposes the duel for the next step.
    fn select(&mut self, rng: &mut DuelRng) -> DuelChoice;

    /// Feeds back the winner of `choice`.
    fn record(&mut self, choice: &DuelChoice, winner: ArmId) -> Result<(), PolicyError>;

    /// The arm the policy has committed to, once it has stopped exploring.
    fn winner(&self) -> Option<ArmId> {
        None
    }

    /// Best current guess of the winning arm. Defaults to [`Self::winner`].
    fn recommendation(&self) -> Option<ArmId> {
        self.winner()
    }

    /// Batch lifetimes with per-pair duel counts, for merge-family policies.
    fn batch_epochs(&self) -> Option<Vec<BatchEpoch>> {
        None
    }

    /// Serializable snapshot of the policy state.
    fn snapshot(&self) -> serde_json::Value;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loser_lookup() {
        let c = DuelChoice::new(ArmId(1), ArmId(4), 0);
        assert!(!c.is_self_duel);
        assert_eq!(c.loser(ArmId(1)), Ok(ArmId(4)));
        assert_eq!(c.loser(ArmId(4)), Ok(ArmId(1)));
        assert!(matches!(c.loser(ArmId(2)), Err(PolicyError::WinnerNotInPair { .. })));
        assert!(DuelChoice::new(ArmId(3), ArmId(3), 0).is_self_duel);
    }
}
