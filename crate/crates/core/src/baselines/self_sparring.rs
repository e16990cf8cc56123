use serde::{Deserialize, Serialize};

use crate::matrix::ArmId;
use crate::policy::{DuelChoice, DuelPolicy, PolicyError};
use crate::sampling::{argmax_random_tie, sample_posterior, DuelRng};

/// Self-Sparring with independent Beta posteriors per arm.
///
/// Each step draws one posterior sample per arm, twice; the two argmaxes are
/// the duel (they may coincide). The winner's win count and the loser's loss
/// count go up. No parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfSparring {
    wins: Vec<u64>,
    losses: Vec<u64>,
    step: u64,
}

impl SelfSparring {
    pub fn new(k: usize) -> Result<Self, PolicyError> {
        if k == 0 {
            return Err(PolicyError::BadParams("need at least one arm".into()));
        }
        Ok(Self {
            wins: vec![0; k],
            losses: vec![0; k],
            step: 0,
        })
    }

    pub fn wins(&self) -> &[u64] {
        &self.wins
    }

    pub fn losses(&self) -> &[u64] {
        &self.losses
    }

    /// Restores a state from explicit statistics.
    pub fn from_record(wins: Vec<u64>, losses: Vec<u64>) -> Self {
        Self { wins, losses, step: 0 }
    }

    fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> ArmId {
        let samples: Vec<f64> = self
            .wins
            .iter()
            .zip(&self.losses)
            .map(|(&w, &l)| sample_posterior(rng, w, l))
            .collect();
        ArmId(argmax_random_tie(rng, &samples))
    }
}

impl DuelPolicy for SelfSparring {
    fn name(&self) -> &'static str {
        "self_sparring"
    }

    fn num_arms(&self) -> usize {
        self.wins.len()
    }

    fn steps(&self) -> u64 {
        self.step
    }

    fn select(&mut self, rng: &mut DuelRng) -> DuelChoice {
        let first = self.draw(rng);
        let second = self.draw(rng);
        DuelChoice::new(first, second, 0)
    }

    fn record(&mut self, choice: &DuelChoice, winner: ArmId) -> Result<(), PolicyError> {
        choice.check_range(self.wins.len())?;
        let loser = choice.loser(winner)?;
        if winner != loser {
            self.wins[winner.0] += 1;
            self.losses[loser.0] += 1;
        }
        self.step += 1;
        Ok(())
    }

    /// Arm with the highest posterior mean (lowest index on ties).
    fn recommendation(&self) -> Option<ArmId> {
        let mean = |i: usize| (self.wins[i] as f64 + 1.0) / ((self.wins[i] + self.losses[i]) as f64 + 2.0);
        let mut best = 0;
        for i in 1..self.wins.len() {
            if mean(i) > mean(best) {
                best = i;
            }
        }
        Some(ArmId(best))
    }

    fn snapshot(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("policy state serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bookkeeping() {
        let mut p = SelfSparring::new(3).unwrap();
        p.record(&DuelChoice::new(ArmId(0), ArmId(2), 0), ArmId(0)).unwrap();
        assert_eq!(p.wins(), &[1, 0, 0]);
        assert_eq!(p.losses(), &[0, 0, 1]);
        p.record(&DuelChoice::new(ArmId(1), ArmId(1), 0), ArmId(1)).unwrap();
        assert_eq!(p.wins(), &[1, 0, 0]);
        assert_eq!(p.losses(), &[0, 0, 1]);
        assert_eq!(p.recommendation(), Some(ArmId(0)));
    }

    #[test]
    fn rejects_outsider_winner() {
        let mut p = SelfSparring::new(3).unwrap();
        assert!(p.record(&DuelChoice::new(ArmId(0), ArmId(2), 0), ArmId(1)).is_err());
    }
}
