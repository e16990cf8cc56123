use serde::{Deserialize, Serialize};

/// Win counts `w[i][j]`: how many times arm `i` has beaten arm `j`.
///
/// The diagonal is always zero; self-duels are never recorded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonCounts {
    k: usize,
    w: Vec<u64>,
}

impl ComparisonCounts {
    pub fn new(k: usize) -> Self {
        Self { k, w: vec![0; k * k] }
    }

    /// Builds counts from explicit rows. Panics on a nonzero diagonal or a
    /// ragged matrix; intended for tests and checkpoint restoration.
    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let k = rows.len();
        let mut w = Vec::with_capacity(k * k);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), k, "ragged count matrix");
            assert_eq!(r[i], 0, "self-duel counts must be zero");
            w.extend_from_slice(r);
        }
        Self { k, w }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn wins(&self, i: usize, j: usize) -> u64 {
        self.w[i * self.k + j]
    }

    /// Total duels between `i` and `j` in either direction.
    #[inline]
    pub fn duels(&self, i: usize, j: usize) -> u64 {
        self.wins(i, j) + self.wins(j, i)
    }

    /// Records that `winner` beat `loser`. Ignored when they coincide.
    #[inline]
    pub fn record(&mut self, winner: usize, loser: usize) {
        if winner != loser {
            self.w[winner * self.k + loser] += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.w.iter().sum()
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.w.chunks(self.k.max(1)).map(|r| r.to_vec()).collect()
    }
}
