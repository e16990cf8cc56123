//! Optimistic win-rate estimates and the batch purge rule.

use crate::counts::ComparisonCounts;
use crate::matrix::ArmId;

/// Upper confidence bound on `p[i][j]` from `wins_ij` wins out of
/// `wins_ij + wins_ji` duels, with `log_term = ln(t + C)`.
///
/// A pair that has never been compared gets `+inf`: it can never fall below
/// 0.5, so no arm is eliminated without evidence. Values above 1 are kept.
#[inline]
pub fn ucb_value(wins_ij: u64, wins_ji: u64, alpha: f64, log_term: f64) -> f64 {
    let n = wins_ij + wins_ji;
    if n == 0 {
        return f64::INFINITY;
    }
    let n = n as f64;
    wins_ij as f64 / n + (alpha * log_term / n).sqrt()
}

/// `ln(t + C)`, the exploration term shared by every entry at step `t`.
#[inline]
pub fn log_term(t: u64, c_const: f64) -> f64 {
    (t as f64 + c_const).ln()
}

/// Full K×K UCB matrix at step `t`. The diagonal is `+inf` (never compared).
///
/// Policies only evaluate the entries inside the scheduled batch; this
/// whole-matrix form exists for inspection and global-UCB baselines.
pub fn ucb_matrix(w: &ComparisonCounts, t: u64, c_const: f64, alpha: f64) -> Vec<Vec<f64>> {
    let k = w.k();
    let lt = log_term(t, c_const);
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| ucb_value(w.wins(i, j), w.wins(j, i), alpha, lt))
                .collect()
        })
        .collect()
}

/// Splits `batch` into (kept, removed), removing every arm `i` with
/// `u[i][j] < 0.5` for some other `j` in the batch. The predicate is
/// evaluated against the whole pre-purge batch.
pub fn purge_batch(batch: &[ArmId], u: &[Vec<f64>]) -> (Vec<ArmId>, Vec<ArmId>) {
    purge_with(batch, |i, j| u[i][j])
}

pub(crate) fn purge_with(batch: &[ArmId], u: impl Fn(usize, usize) -> f64) -> (Vec<ArmId>, Vec<ArmId>) {
    batch
        .iter()
        .copied()
        .partition(|&i| !batch.iter().any(|&j| j != i && u(i.0, j.0) < 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncompared_pair_is_infinite() {
        assert_eq!(ucb_value(0, 0, 1.0, 5.0), f64::INFINITY);
    }

    #[test]
    fn plug_in_value() {
        // 3/4 + sqrt(1 * 1 / 4)
        assert!((ucb_value(3, 1, 1.0, 1.0) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn matrix_matches_scalar() {
        let w = ComparisonCounts::from_rows(&[vec![0, 3, 0], vec![1, 0, 2], vec![0, 5, 0]]);
        let u = ucb_matrix(&w, 10, 5.0, 0.7);
        let lt = (15.0f64).ln();
        assert_eq!(u[0][1], ucb_value(3, 1, 0.7, lt));
        assert_eq!(u[0][2], f64::INFINITY);
        assert_eq!(u[1][1], f64::INFINITY);
    }

    #[test]
    fn purge_rules() {
        let mut u = vec![vec![1.0; 6]; 6];
        let batch: Vec<ArmId> = [0, 2, 5].into_iter().map(ArmId).collect();
        assert_eq!(purge_batch(&batch, &u).1, vec![]);
        u[2][5] = 0.4;
        let (kept, removed) = purge_batch(&batch, &u);
        assert_eq!(removed, vec![ArmId(2)]);
        assert_eq!(kept, vec![ArmId(0), ArmId(5)]);
        // Entries outside the batch are ignored.
        u[0][3] = 0.1;
        assert_eq!(purge_batch(&batch, &u).1, vec![ArmId(2)]);
    }

    #[test]
    fn purge_is_simultaneous() {
        // A confident 3-cycle removes all three arms at once.
        let mut u = vec![vec![1.0; 3]; 3];
        u[0][1] = 0.2;
        u[1][2] = 0.2;
        u[2][0] = 0.2;
        let batch: Vec<ArmId> = (0..3).map(ArmId).collect();
        let (kept, removed) = purge_batch(&batch, &u);
        assert!(kept.is_empty());
        assert_eq!(removed.len(), 3);
    }
}
