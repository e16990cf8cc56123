use serde::{Deserialize, Serialize};

use crate::counts::ComparisonCounts;
use crate::matrix::ArmId;
use crate::mergedts::{log_term, ucb_value};
use crate::policy::{DuelChoice, DuelPolicy, PolicyError};
use crate::sampling::{argmax_random_tie, sample_posterior, DuelRng};

use super::rucb::empirical_leader;

/// Double Thompson Sampling over the whole arm set.
///
/// First arm: among arms with the highest optimistic Copeland count
/// `#{j : u_ij > 0.5}`, the one winning the most sampled duels. Second arm:
/// the arm with the highest sampled chance of beating the first, among arms
/// whose lower confidence bound against it is at most 0.5. If no other arm
/// qualifies the first arm duels itself. Confidence terms use `ln(t + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dts {
    alpha: f64,
    w: ComparisonCounts,
    step: u64,
}

impl Dts {
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

    fn log_term(&self) -> f64 {
        log_term(self.step + 1, 1.0)
    }

    fn lcb(&self, i: usize, j: usize, lt: f64) -> f64 {
        let n = self.w.duels(i, j);
        if n == 0 {
            return f64::NEG_INFINITY;
        }
        let n = n as f64;
        self.w.wins(i, j) as f64 / n - (self.alpha * lt / n).sqrt()
    }

    /// Arms maximizing the optimistic Copeland count.
    pub fn candidates(&self) -> Vec<ArmId> {
        let k = self.w.k();
        let lt = self.log_term();
        let counts: Vec<usize> = (0..k)
            .map(|i| {
                (0..k)
                    .filter(|&j| j != i && ucb_value(self.w.wins(i, j), self.w.wins(j, i), self.alpha, lt) > 0.5)
                    .count()
            })
            .collect();
        let best = counts.iter().copied().max().unwrap_or(0);
        (0..k).filter(|&i| counts[i] == best).map(ArmId).collect()
    }
}

impl DuelPolicy for Dts {
    fn name(&self) -> &'static str {
        "dts"
    }

    fn num_arms(&self) -> usize {
        self.w.k()
    }

    fn steps(&self) -> u64 {
        self.step
    }

    fn select(&mut self, rng: &mut DuelRng) -> DuelChoice {
        let k = self.w.k();
        if k == 1 {
            return DuelChoice::new(ArmId(0), ArmId(0), 0);
        }
        let cands = self.candidates();
        let mut is_cand = vec![false; k];
        for c in &cands {
            is_cand[c.0] = true;
        }
        // Sampled Copeland wins for candidates; pairs in (i < j) order,
        // skipping pairs that touch no candidate.
        let mut wins = vec![0usize; k];
        for i in 0..k {
            for j in (i + 1)..k {
                if !is_cand[i] && !is_cand[j] {
                    continue;
                }
                let theta = sample_posterior(rng, self.w.wins(i, j), self.w.wins(j, i));
                if theta > 0.5 {
                    wins[i] += 1;
                } else if theta < 0.5 {
                    wins[j] += 1;
                }
            }
        }
        let scores: Vec<f64> = cands.iter().map(|c| wins[c.0] as f64).collect();
        let first = cands[argmax_random_tie(rng, &scores)];

        let lt = self.log_term();
        let eligible: Vec<ArmId> = (0..k)
            .filter(|&j| j != first.0 && self.lcb(j, first.0, lt) <= 0.5)
            .map(ArmId)
            .collect();
        if eligible.is_empty() {
            return DuelChoice::new(first, first, 0);
        }
        let phi: Vec<f64> = eligible
            .iter()
            .map(|j| sample_posterior(rng, self.w.wins(j.0, first.0), self.w.wins(first.0, j.0)))
            .collect();
        let second = eligible[argmax_random_tie(rng, &phi)];
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
    fn dominant_arm_is_chosen_first() {
        let mut rows = vec![vec![0u64; 3]; 3];
        rows[0][1] = 100_000;
        rows[0][2] = 100_000;
        let mut p = Dts::from_counts(0.51, ComparisonCounts::from_rows(&rows));
        assert_eq!(p.candidates(), vec![ArmId(0)]);
        let mut rng = stream_rng(0, Stream::Policy);
        let c = p.select(&mut rng);
        assert_eq!(c.first, ArmId(0));
        // Both challengers have LCB far below 0.5, so they stay eligible.
        assert_ne!(c.second, ArmId(0));
    }

    #[test]
    fn no_eligible_challenger_means_self_duel() {
        // A challenger that confidently beats the first arm is not eligible.
        let mut rows = vec![vec![0u64; 2]; 2];
        rows[1][0] = 100_000;
        let p = Dts::from_counts(0.51, ComparisonCounts::from_rows(&rows));
        let lt = p.log_term();
        assert!(p.lcb(1, 0, lt) > 0.5);
        assert!(p.lcb(0, 1, lt) <= 0.5);
    }

    #[test]
    fn single_arm() {
        let mut p = Dts::new(1, 0.51).unwrap();
        let mut rng = stream_rng(0, Stream::Policy);
        assert!(p.select(&mut rng).is_self_duel);
    }
}
