//! Per-step regret under the Condorcet and Copeland criteria.

use thiserror::Error;

use crate::matrix::{ArmId, PreferenceMatrix};
use crate::winners::{beaten_count, condorcet_winner};

#[derive(Debug, Error, PartialEq)]
pub enum RegretError {
    #[error("arm {0} is not the Condorcet winner of this matrix")]
    NoCondorcet(ArmId),
    #[error("arm {arm} out of range for K = {k}")]
    ArmOutOfRange { arm: ArmId, k: usize },
}

/// Regret of dueling `i` against `j` relative to the Condorcet winner `c`:
/// `((p[c][i] - 0.5) + (p[c][j] - 0.5)) / 2`.
pub fn step_regret(
    m: &PreferenceMatrix,
    c: ArmId,
    i: ArmId,
    j: ArmId,
) -> Result<f64, RegretError> {
    for arm in [c, i, j] {
        if !m.contains(arm) {
            return Err(RegretError::ArmOutOfRange { arm, k: m.k() });
        }
    }
    if condorcet_winner(m) != Some(c) {
        return Err(RegretError::NoCondorcet(c));
    }
    Ok(condorcet_regret_unchecked(m, c.0, i.0, j.0))
}

#[inline]
pub(crate) fn condorcet_regret_unchecked(m: &PreferenceMatrix, c: usize, i: usize, j: usize) -> f64 {
    ((m.get(c, i) - 0.5) + (m.get(c, j) - 0.5)) / 2.0
}

/// Copeland regret `zeta* - (zeta_i + zeta_j) / 2`.
pub fn copeland_step_regret(m: &PreferenceMatrix, i: ArmId, j: ArmId) -> Result<f64, RegretError> {
    for arm in [i, j] {
        if !m.contains(arm) {
            return Err(RegretError::ArmOutOfRange { arm, k: m.k() });
        }
    }
    Ok(CopelandTable::new(m).regret(i.0, j.0))
}

/// Precomputed Copeland scores for repeated regret lookups inside a run.
#[derive(Debug, Clone)]
pub(crate) struct CopelandTable {
    counts: Vec<usize>,
    best: usize,
    denom: f64,
}

impl CopelandTable {
    pub(crate) fn new(m: &PreferenceMatrix) -> Self {
        let counts: Vec<usize> = (0..m.k()).map(|i| beaten_count(m, i)).collect();
        let best = *counts.iter().max().expect("k >= 2");
        Self {
            counts,
            best,
            denom: (m.k() - 1) as f64,
        }
    }

    // Computed on integer counts so that winner pairs give exactly 0.
    #[inline]
    pub(crate) fn regret(&self, i: usize, j: usize) -> f64 {
        let deficit = (self.best - self.counts[i]) + (self.best - self.counts[j]);
        deficit as f64 / (2.0 * self.denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_arm() -> PreferenceMatrix {
        PreferenceMatrix::from_rows(&[
            vec![0.5, 0.9, 0.7],
            vec![0.1, 0.5, 0.6],
            vec![0.3, 0.4, 0.5],
        ])
        .unwrap()
    }

    #[test]
    fn formula_arithmetic() {
        let m = three_arm();
        let r = step_regret(&m, ArmId(0), ArmId(1), ArmId(2)).unwrap();
        assert!((r - 0.3).abs() < 1e-12);
        assert_eq!(step_regret(&m, ArmId(0), ArmId(0), ArmId(0)).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_in_pair() {
        let m = three_arm();
        for i in 0..3 {
            for j in 0..3 {
                let a = step_regret(&m, ArmId(0), ArmId(i), ArmId(j)).unwrap();
                let b = step_regret(&m, ArmId(0), ArmId(j), ArmId(i)).unwrap();
                assert_eq!(a, b);
                assert!(a >= 0.0);
                assert_eq!(a == 0.0, i == 0 && j == 0);
            }
        }
    }

    #[test]
    fn wrong_condorcet_is_rejected() {
        let m = three_arm();
        assert_eq!(
            step_regret(&m, ArmId(1), ArmId(0), ArmId(2)),
            Err(RegretError::NoCondorcet(ArmId(1)))
        );
        assert!(matches!(
            step_regret(&m, ArmId(0), ArmId(7), ArmId(2)),
            Err(RegretError::ArmOutOfRange { .. })
        ));
    }

    #[test]
    fn copeland_regret_of_winner_is_zero() {
        let m = three_arm();
        assert_eq!(copeland_step_regret(&m, ArmId(0), ArmId(0)).unwrap(), 0.0);
        // zeta = [1, 1/2, 0]
        let r = copeland_step_regret(&m, ArmId(1), ArmId(2)).unwrap();
        assert!((r - 0.75).abs() < 1e-12);
    }
}
