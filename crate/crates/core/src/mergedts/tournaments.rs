//! The two Thompson-sampling tournaments that pick a duel inside a batch.

use rand::Rng;

use crate::counts::ComparisonCounts;
use crate::matrix::ArmId;
use crate::sampling::{argmax_random_tie, argmin_random_tie, sample_posterior};

/// Picks the first arm: sample one preference per unordered pair from its
/// Beta posterior, score every arm by the fraction of batchmates it beats in
/// the sample, and return a uniformly random arm among the best.
///
/// Draw order: pairs in (i < j) order over the batch, then the tie-break.
pub fn sample_tournament<R: Rng + ?Sized>(w: &ComparisonCounts, batch: &[ArmId], rng: &mut R) -> ArmId {
    assert!(!batch.is_empty(), "empty batch");
    let n = batch.len();
    if n == 1 {
        return batch[0];
    }
    let mut wins = vec![0usize; n];
    for a in 0..n {
        let i = batch[a].0;
        for b in (a + 1)..n {
            let j = batch[b].0;
            let theta = sample_posterior(rng, w.wins(i, j), w.wins(j, i));
            // theta_ji = 1 - theta_ij
            if theta > 0.5 {
                wins[a] += 1;
            } else if theta < 0.5 {
                wins[b] += 1;
            }
        }
    }
    let denom = (n - 1) as f64;
    let kappa: Vec<f64> = wins.iter().map(|&c| c as f64 / denom).collect();
    batch[argmax_random_tie(rng, &kappa)]
}

/// Picks the second arm: sample how likely each batchmate is to beat `first`
/// and return the one least likely to. `first` itself is only returned when
/// it is alone in the batch.
pub fn relative_tournament<R: Rng + ?Sized>(
    w: &ComparisonCounts,
    batch: &[ArmId],
    first: ArmId,
    rng: &mut R,
) -> ArmId {
    assert!(batch.contains(&first), "first arm must belong to the batch");
    let c = first.0;
    let others: Vec<ArmId> = batch.iter().copied().filter(|&a| a != first).collect();
    if others.is_empty() {
        return first;
    }
    // phi_c = 1 sits above every draw; leaving `first` out of the argmin also
    // covers a draw landing exactly on 1.
    let phi: Vec<f64> = others
        .iter()
        .map(|&j| sample_posterior(rng, w.wins(j.0, c), w.wins(c, j.0)))
        .collect();
    others[argmin_random_tie(rng, &phi)]
}
