use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::counts::ComparisonCounts;
use crate::matrix::ArmId;
use crate::mergedts::{log_term, ucb_value};
use crate::policy::{DuelChoice, DuelPolicy, PolicyError};
use crate::sampling::DuelRng;

use super::merge_rucb::most_optimistic_challenger;

/// Relative UCB over the whole arm set, without elimination. The log term is
/// `ln(t + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rucb {
    alpha: f64,
    w: ComparisonCounts,
    step: u64,
}

impl Rucb {
    pub fn new(k: usize, alpha: f64) -> Result<Self, PolicyError> {
        if k == 0 {
            return Err(PolicyError::BadParams("need at least one arm".into()));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(PolicyError::BadParams(format!("alpha = {alpha} must be > 0")));
        }
        Ok(Self {
            alpha,
            w: ComparisonCounts::new(k),
            step: 0,
        })
    }

    pub fn counts(&self) -> &ComparisonCounts {
        &self.w
    }

    /// Restores a state from explicit statistics.
    pub fn from_counts(alpha: f64, w: ComparisonCounts) -> Self {
        Self { alpha, w, step: 0 }
    }

    fn ucb(&self, i: usize, j: usize) -> f64 {
        let lt = log_term(self.step + 1, 1.0);
        ucb_value(self.w.wins(i, j), self.w.wins(j, i), self.alpha, lt)
    }

    /// Arms whose UCB against every other arm is at least 0.5.
    pub fn candidates(&self) -> Vec<ArmId> {
        let k = self.w.k();
        (0..k)
            .filter(|&i| (0..k).all(|j| j == i || self.ucb(i, j) >= 0.5))
            .map(ArmId)
            .collect()
    }
}

/// Arm beating the most others on raw win counts (lowest index on ties).
pub(crate) fn empirical_leader(w: &ComparisonCounts) -> ArmId {
    let k = w.k();
    let score = |i: usize| (0..k).filter(|&j| j != i && w.wins(i, j) > w.wins(j, i)).count();
    let mut best = 0;
    for i in 1..k {
        if score(i) > score(best) {
            best = i;
        }
    }
    ArmId(best)
}

impl DuelPolicy for Rucb {
    fn name(&self) -> &'static str {
        "rucb"
    }

    fn num_arms(&self) -> usize {
        self.w.k()
    }

    fn steps(&self) -> u64 {
        self.step
    }

    fn select(&mut self, rng: &mut DuelRng) -> DuelChoice {
        let k = self.w.k();
        let mut pool = self.candidates();
        if pool.is_empty() {
            pool = (0..k).map(ArmId).collect();
        }
        let first = pool[rng.random_range(0..pool.len())];
        let all: Vec<ArmId> = (0..k).map(ArmId).collect();
        let second = most_optimistic_challenger(&all, first, |i, j| self.ucb(i, j), rng);
        DuelChoice::new(first, second, 0)
    }

    fn record(&mut self, choice: &DuelChoice, winner: ArmId) -> Result<(), PolicyError> {
        choice.check_range(self.w.k())?;
        let loser = choice.loser(winner)?;
        self.w.record(winner.0, loser.0);
        self.step += 1;
        Ok(())
    }

    fn recommendation(&self) -> Option<ArmId> {
        Some(empirical_leader(&self.w))
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
    fn fresh_state_draws_first_uniformly() {
        let mut p = Rucb::new(4, 0.51).unwrap();
        assert_eq!(p.candidates().len(), 4);
        let mut rng = stream_rng(1, Stream::Policy);
        let mut hits = [0usize; 4];
        for _ in 0..4000 {
            let c = p.select(&mut rng);
            assert_ne!(c.first, c.second);
            hits[c.first.0] += 1;
        }
        assert!(hits.iter().all(|&h| h > 850), "{hits:?}");
    }

    #[test]
    fn lone_candidate_is_chosen() {
        // Arm 3 has beaten everyone decisively; everyone else has a losing
        // record against some arm.
        let mut rows = vec![vec![0u64; 4]; 4];
        rows[3][..3].fill(200);
        rows[0][1] = 200;
        rows[1][2] = 200;
        rows[2][0] = 200;
        let w = ComparisonCounts::from_rows(&rows);
        let p = Rucb::from_counts(0.51, w);
        assert_eq!(p.candidates(), vec![ArmId(3)]);
        let mut p = p;
        let mut rng = stream_rng(2, Stream::Policy);
        for _ in 0..50 {
            assert_eq!(p.select(&mut rng).first, ArmId(3));
        }
        assert_eq!(p.recommendation(), Some(ArmId(3)));
    }

    #[test]
    fn single_arm_self_duels() {
        let mut p = Rucb::new(1, 0.51).unwrap();
        let mut rng = stream_rng(0, Stream::Policy);
        assert!(p.select(&mut rng).is_self_duel);
    }
}
