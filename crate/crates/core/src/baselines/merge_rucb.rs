use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::ArmId;
use crate::mergedts::{BatchEpoch, BatchSet, BatchedElimination, MergeDtsParams, Scheduled};
use crate::policy::{DuelChoice, DuelPolicy, PolicyError};
use crate::sampling::{argmax_random_tie, DuelRng};

/// MergeRUCB: the same batch, purge and repartition machinery as MergeDTS,
/// but the first arm is uniform over the batch and the second is the
/// batchmate with the highest UCB of beating it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeRucb {
    params: MergeDtsParams,
    core: BatchedElimination,
}

impl MergeRucb {
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

    pub fn machinery(&self) -> &BatchedElimination {
        &self.core
    }

    pub fn batch_set(&self) -> BatchSet {
        self.core.batch_set()
    }
}

/// `argmax_{j in batch, j != first} u[j][first]`, ties broken at random.
pub(crate) fn most_optimistic_challenger<R: Rng + ?Sized>(
    batch: &[ArmId],
    first: ArmId,
    ucb: impl Fn(usize, usize) -> f64,
    rng: &mut R,
) -> ArmId {
    let others: Vec<ArmId> = batch.iter().copied().filter(|&a| a != first).collect();
    if others.is_empty() {
        return first;
    }
    let scores: Vec<f64> = others.iter().map(|j| ucb(j.0, first.0)).collect();
    others[argmax_random_tie(rng, &scores)]
}

impl DuelPolicy for MergeRucb {
    fn name(&self) -> &'static str {
        "merge_rucb"
    }

    fn num_arms(&self) -> usize {
        self.core.k()
    }

    fn steps(&self) -> u64 {
        self.core.steps()
    }

    fn select(&mut self, rng: &mut DuelRng) -> DuelChoice {
        match self.core.schedule() {
            Scheduled::Finished(arm) => DuelChoice::new(arm, arm, 0),
            Scheduled::Batch(m) => {
                let batch = self.core.batch(m);
                let first = batch[rng.random_range(0..batch.len())];
                let second = most_optimistic_challenger(batch, first, |i, j| self.core.ucb(i, j), rng);
                DuelChoice::new(first, second, m)
            }
        }
    }

    fn record(&mut self, choice: &DuelChoice, winner: ArmId) -> Result<(), PolicyError> {
        choice.check_range(self.core.k())?;
        let loser = choice.loser(winner)?;
        self.core.record(choice.batch_index, winner, loser);
        Ok(())
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{stream_rng, Stream};

    #[test]
    fn challenger_is_argmax_ucb_against_first() {
        let batch: Vec<ArmId> = [0, 1, 2].into_iter().map(ArmId).collect();
        let u = |i: usize, j: usize| match (i, j) {
            (1, 0) => 1.2,
            (2, 0) => 0.8,
            _ => 0.5,
        };
        let mut rng = stream_rng(0, Stream::Policy);
        for _ in 0..20 {
            assert_eq!(most_optimistic_challenger(&batch, ArmId(0), u, &mut rng), ArmId(1));
        }
    }

    #[test]
    fn single_arm_self_duels() {
        let mut p = MergeRucb::new(1, MergeDtsParams::theoretical(10)).unwrap();
        let mut rng = stream_rng(0, Stream::Policy);
        let c = p.select(&mut rng);
        assert!(c.is_self_duel);
    }
}
