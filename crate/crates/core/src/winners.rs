//! Winner notions (Condorcet, Copeland, Borda) and gap statistics.

use serde::{Deserialize, Serialize};

use crate::matrix::{ArmId, PreferenceMatrix};

/// The arm that beats every other arm with probability strictly above 0.5,
/// if one exists.
pub fn condorcet_winner(m: &PreferenceMatrix) -> Option<ArmId> {
    let k = m.k();
    (0..k)
        .find(|&c| (0..k).all(|j| j == c || m.get(c, j) > 0.5))
        .map(ArmId)
}

/// Normalized Copeland scores: the fraction of the other `K - 1` arms each arm
/// beats. A tie at exactly 0.5 does not count as a win.
pub fn copeland_scores(m: &PreferenceMatrix) -> Vec<f64> {
    let k = m.k();
    (0..k)
        .map(|i| beaten_count(m, i) as f64 / (k - 1) as f64)
        .collect()
}

pub(crate) fn beaten_count(m: &PreferenceMatrix, i: usize) -> usize {
    (0..m.k()).filter(|&j| j != i && m.get(i, j) > 0.5).count()
}

/// Arms attaining the maximum Copeland score. Never empty.
pub fn copeland_winners(m: &PreferenceMatrix) -> Vec<ArmId> {
    let k = m.k();
    let counts: Vec<usize> = (0..k).map(|i| beaten_count(m, i)).collect();
    let best = *counts.iter().max().expect("k >= 2");
    (0..k).filter(|&i| counts[i] == best).map(ArmId).collect()
}

/// Borda scores as plain row sums, including the self term `p[i][i] = 0.5`.
pub fn borda_scores(m: &PreferenceMatrix) -> Vec<f64> {
    (0..m.k()).map(|i| m.row(i).iter().sum()).collect()
}

/// Gaps `|p[i][j] - 0.5|` and the smallest strictly positive one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub k: usize,
    pub delta: Vec<Vec<f64>>,
    /// Absent when every off-diagonal pair is tied.
    pub delta_min: Option<f64>,
    pub indistinguishable_pairs: Vec<(usize, usize)>,
}

pub fn gap_summary(m: &PreferenceMatrix) -> GapSummary {
    let k = m.k();
    let delta: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| (m.get(i, j) - 0.5).abs()).collect())
        .collect();
    let mut delta_min: Option<f64> = None;
    let mut indistinguishable_pairs = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let d = (m.get(i, j) - 0.5).abs();
            if d > 0.0 {
                delta_min = Some(delta_min.map_or(d, |cur| cur.min(d)));
            } else {
                indistinguishable_pairs.push((i, j));
            }
        }
    }
    GapSummary {
        k,
        delta,
        delta_min,
        indistinguishable_pairs,
    }
}

/// Smallest positive gap among pairs drawn from `arms`, if any pair is
/// distinguishable.
pub fn subset_delta_min(m: &PreferenceMatrix, arms: &[usize]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (a, &i) in arms.iter().enumerate() {
        for &j in &arms[a + 1..] {
            let d = (m.get(i, j) - 0.5).abs();
            if d > 0.0 {
                best = Some(best.map_or(d, |b: f64| b.min(d)));
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinnerReport {
    pub condorcet: Option<ArmId>,
    pub copeland_scores: Vec<f64>,
    pub copeland_winners: Vec<ArmId>,
    pub borda_scores: Vec<f64>,
    /// Human-readable notes, e.g. about tied (indistinguishable) pairs.
    pub warnings: Vec<String>,
}

pub fn winner_report(m: &PreferenceMatrix) -> WinnerReport {
    let gaps = gap_summary(m);
    let mut warnings = Vec::new();
    if !gaps.indistinguishable_pairs.is_empty() {
        warnings.push(format!(
            "{} indistinguishable pair(s) with p = 0.5; excluded from the minimum gap",
            gaps.indistinguishable_pairs.len()
        ));
    }
    WinnerReport {
        condorcet: condorcet_winner(m),
        copeland_scores: copeland_scores(m),
        copeland_winners: copeland_winners(m),
        borda_scores: borda_scores(m),
        warnings,
    }
}
