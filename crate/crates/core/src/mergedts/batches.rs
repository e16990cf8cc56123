//! Batch bookkeeping shared by the merge-family policies: round-robin
//! scheduling, UCB purges, singleton merges and stage repartitions.
//!
//! Each batch is kept sorted by arm index. Batch membership changes only in
//! three ways: purges remove arms, a singleton left by a purge merges into
//! the cyclically next batch, and stage transitions repartition everything.

use serde::{Deserialize, Serialize};

use super::ucb::{log_term, purge_with, ucb_value};
use crate::counts::ComparisonCounts;
use crate::matrix::ArmId;

/// Duels between one unordered pair (`first < second`) during a batch epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCount {
    pub first: usize,
    pub second: usize,
    pub count: u64,
}

/// The lifetime of one batch, from its formation until it is merged with
/// another batch (or the run ends). Purges shrink a batch without ending
/// its epoch; `members` are the arms at formation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchEpoch {
    pub id: usize,
    pub members: Vec<usize>,
    pub opened_at: u64,
    pub closed_at: Option<u64>,
    pub pair_counts: Vec<PairCount>,
}

impl BatchEpoch {
    fn bump(&mut self, a: usize, b: usize) {
        let (first, second) = if a < b { (a, b) } else { (b, a) };
        match self
            .pair_counts
            .binary_search_by(|p| (p.first, p.second).cmp(&(first, second)))
        {
            Ok(pos) => self.pair_counts[pos].count += 1,
            Err(pos) => self.pair_counts.insert(
                pos,
                PairCount {
                    first,
                    second,
                    count: 1,
                },
            ),
        }
    }
}

/// Read-only view of the current partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSet {
    pub stage: u32,
    pub batches: Vec<Vec<ArmId>>,
}

impl BatchSet {
    pub fn survivor_count(&self) -> usize {
        self.batches.iter().map(Vec::len).sum()
    }
}

/// Outcome of scheduling one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduled {
    /// One arm is left; the policy self-duels it from now on.
    Finished(ArmId),
    /// Index of the (post-purge, post-merge) batch to draw the duel from.
    Batch(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchedElimination {
    k: usize,
    batch_size: usize,
    alpha: f64,
    c_const: f64,
    w: ComparisonCounts,
    batches: Vec<Vec<ArmId>>,
    batch_epoch: Vec<usize>,
    epochs: Vec<BatchEpoch>,
    stage: u32,
    survivors: usize,
    step: u64,
}

impl BatchedElimination {
    /// Groups arms `0..k` in order into `ceil(k / batch_size)` batches.
    pub fn new(k: usize, batch_size: usize, alpha: f64, c_const: f64) -> Self {
        assert!(k >= 1 && batch_size >= 1);
        let mut this = Self {
            k,
            batch_size,
            alpha,
            c_const,
            w: ComparisonCounts::new(k),
            batches: Vec::new(),
            batch_epoch: Vec::new(),
            epochs: Vec::new(),
            stage: 1,
            survivors: k,
            step: 0,
        };
        let initial: Vec<Vec<ArmId>> = (0..k)
            .collect::<Vec<_>>()
            .chunks(batch_size)
            .map(|c| c.iter().copied().map(ArmId).collect())
            .collect();
        for b in initial {
            let e = this.open_epoch(&b);
            this.batches.push(b);
            this.batch_epoch.push(e);
        }
        this
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c_const(&self) -> f64 {
        self.c_const
    }

    pub fn counts(&self) -> &ComparisonCounts {
        &self.w
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn survivor_count(&self) -> usize {
        self.survivors
    }

    pub fn batch(&self, m: usize) -> &[ArmId] {
        &self.batches[m]
    }

    pub fn batch_set(&self) -> BatchSet {
        BatchSet {
            stage: self.stage,
            batches: self.batches.clone(),
        }
    }

    pub fn epochs(&self) -> &[BatchEpoch] {
        &self.epochs
    }

    pub fn is_finished(&self) -> bool {
        self.batches.len() == 1 && self.batches[0].len() == 1
    }

    pub fn winner(&self) -> Option<ArmId> {
        self.is_finished().then(|| self.batches[0][0])
    }

    /// UCB of `p[i][j]` at the upcoming step.
    pub fn ucb(&self, i: usize, j: usize) -> f64 {
        let lt = log_term(self.step + 1, self.c_const);
        ucb_value(self.w.wins(i, j), self.w.wins(j, i), self.alpha, lt)
    }

    /// Runs the per-step bookkeeping for step `t = steps() + 1`: picks batch
    /// `(t - 1) mod b`, purges it, and merges a resulting singleton into the
    /// next batch.
    pub fn schedule(&mut self) -> Scheduled {
        if let Some(arm) = self.winner() {
            return Scheduled::Finished(arm);
        }
        let t = self.step + 1;
        let m = ((t - 1) % self.batches.len() as u64) as usize;
        self.purge(m, log_term(t, self.c_const));
        if self.batches.len() > 1 && self.batches[m].len() == 1 {
            return Scheduled::Batch(self.merge_with_next(m, t));
        }
        Scheduled::Batch(m)
    }

    fn purge(&mut self, m: usize, lt: f64) {
        let w = &self.w;
        let alpha = self.alpha;
        let u = |i: usize, j: usize| ucb_value(w.wins(i, j), w.wins(j, i), alpha, lt);
        let batch = &self.batches[m];
        let (mut kept, removed) = purge_with(batch, u);
        if removed.is_empty() {
            return;
        }
        if kept.is_empty() {
            // Confident cycle: every arm is beaten by some batchmate. Keep the
            // arm whose worst optimistic estimate is highest (lowest index on ties).
            let min_ucb = |i: ArmId| {
                batch
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| u(i.0, j.0))
                    .fold(f64::INFINITY, f64::min)
            };
            let mut best = batch[0];
            let mut best_val = min_ucb(best);
            for &i in &batch[1..] {
                let v = min_ucb(i);
                if v > best_val {
                    best = i;
                    best_val = v;
                }
            }
            kept.push(best);
        }
        self.survivors -= batch.len() - kept.len();
        self.batches[m] = kept;
    }

    fn merge_with_next(&mut self, m: usize, t: u64) -> usize {
        let b = self.batches.len();
        let next = (m + 1) % b;
        let mut merged = self.batches[m].clone();
        merged.extend_from_slice(&self.batches[next]);
        merged.sort_unstable();
        self.close_epoch(self.batch_epoch[m], t);
        self.close_epoch(self.batch_epoch[next], t);
        let e = self.open_epoch(&merged);
        let (keep, drop) = if next > m { (m, next) } else { (next, m) };
        self.batches[keep] = merged;
        self.batch_epoch[keep] = e;
        self.batches.remove(drop);
        self.batch_epoch.remove(drop);
        keep
    }

    /// Records a duel drawn from batch `batch_index`, advances the step
    /// counter and checks the stage transition. Returns whether the stage
    /// advanced.
    pub fn record(&mut self, batch_index: usize, winner: ArmId, loser: ArmId) -> bool {
        if winner != loser {
            self.w.record(winner.0, loser.0);
            if let Some(&e) = self.batch_epoch.get(batch_index) {
                self.epochs[e].bump(winner.0, loser.0);
            }
        }
        self.step += 1;
        self.maybe_repartition()
    }

    /// Advances to the next stage once at most `K / 2^stage` arms survive,
    /// regrouping batches so every size lies in `[ceil(M/2), floor(3M/2)]`
    /// (or a single batch holds everyone when fewer than `ceil(M/2)` remain).
    pub fn maybe_repartition(&mut self) -> bool {
        let threshold = self.k as f64 / 2f64.powi(self.stage as i32);
        if self.survivors as f64 > threshold {
            return false;
        }
        self.repartition();
        self.stage += 1;
        true
    }

    fn repartition(&mut self) {
        let lo = self.batch_size.div_ceil(2);
        let hi = (3 * self.batch_size / 2).max(lo);
        // Working list: (arms, epoch kept if the batch is untouched).
        let mut work: Vec<(Vec<ArmId>, Option<usize>)> = self
            .batches
            .drain(..)
            .zip(self.batch_epoch.drain(..))
            .map(|(b, e)| (b, Some(e)))
            .collect();

        while work.len() > 1 {
            let small = argmin_by_len(&work, None);
            let s = work[small].0.len();
            if s >= lo {
                break;
            }
            let partner = (0..work.len())
                .filter(|&p| p != small && work[p].0.len() + s <= hi)
                .fold(None, |best: Option<usize>, p| match best {
                    Some(q) if work[q].0.len() >= work[p].0.len() => Some(q),
                    _ => Some(p),
                });
            match partner {
                Some(p) => {
                    let (arms, _) = work.remove(small);
                    let p = if p > small { p - 1 } else { p };
                    work[p].0.extend(arms);
                    work[p].0.sort_unstable();
                    work[p].1 = None;
                }
                None => {
                    // No batch can absorb the small one within the cap: pool it
                    // with the next-smallest batch and split the pool in two.
                    let q = argmin_by_len(&work, Some(small));
                    let mut pool = work[small].0.clone();
                    pool.extend_from_slice(&work[q].0);
                    pool.sort_unstable();
                    let tail = pool.split_off(pool.len() / 2);
                    work[small] = (pool, None);
                    work[q] = (tail, None);
                }
            }
        }

        let mut out: Vec<(Vec<ArmId>, Option<usize>)> = Vec::with_capacity(work.len());
        for (arms, e) in work {
            if arms.len() > hi {
                let parts = arms.len().div_ceil(hi);
                for chunk in split_even(&arms, parts) {
                    out.push((chunk, None));
                }
            } else {
                out.push((arms, e));
            }
        }

        let t = self.step;
        let live: Vec<usize> = out.iter().filter_map(|(_, e)| *e).collect();
        let open: Vec<usize> = self
            .epochs
            .iter()
            .filter(|ep| ep.closed_at.is_none() && !live.contains(&ep.id))
            .map(|ep| ep.id)
            .collect();
        for id in open {
            self.close_epoch(id, t);
        }
        for (arms, e) in out {
            let e = match e {
                Some(e) => e,
                None => self.open_epoch(&arms),
            };
            self.batches.push(arms);
            self.batch_epoch.push(e);
        }
    }

    fn open_epoch(&mut self, members: &[ArmId]) -> usize {
        let id = self.epochs.len();
        self.epochs.push(BatchEpoch {
            id,
            members: members.iter().map(|a| a.0).collect(),
            opened_at: self.step,
            closed_at: None,
            pair_counts: Vec::new(),
        });
        id
    }

    fn close_epoch(&mut self, id: usize, at: u64) {
        self.epochs[id].closed_at.get_or_insert(at);
    }

    #[cfg(test)]
    pub(crate) fn set_counts(&mut self, w: ComparisonCounts) {
        self.w = w;
    }

    #[cfg(test)]
    pub(crate) fn set_step(&mut self, step: u64) {
        self.step = step;
    }
}

fn argmin_by_len(work: &[(Vec<ArmId>, Option<usize>)], skip: Option<usize>) -> usize {
    let mut best: Option<usize> = None;
    for (i, (arms, _)) in work.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        if best.is_none_or(|b| arms.len() < work[b].0.len()) {
            best = Some(i);
        }
    }
    best.expect("at least one candidate batch")
}

/// Splits `arms` into `parts` contiguous chunks whose sizes differ by at most one.
fn split_even(arms: &[ArmId], parts: usize) -> Vec<Vec<ArmId>> {
    let base = arms.len() / parts;
    let extra = arms.len() % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for p in 0..parts {
        let len = base + usize::from(p < extra);
        out.push(arms[start..start + len].to_vec());
        start += len;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(b: &[ArmId]) -> Vec<usize> {
        b.iter().map(|a| a.0).collect()
    }

    fn sizes(core: &BatchedElimination) -> Vec<usize> {
        core.batches.iter().map(Vec::len).collect()
    }

    #[test]
    fn initial_grouping() {
        let core = BatchedElimination::new(10, 4, 1.0, 10.0);
        assert_eq!(sizes(&core), vec![4, 4, 2]);
        assert_eq!(ids(core.batch(2)), vec![8, 9]);
        assert_eq!(core.stage(), 1);
        assert_eq!(BatchedElimination::new(4, 4, 1.0, 10.0).batches.len(), 1);
        let single = BatchedElimination::new(1, 4, 1.0, 10.0);
        assert_eq!(single.winner(), Some(ArmId(0)));
    }

    #[test]
    fn round_robin_schedule() {
        let mut core = BatchedElimination::new(9, 3, 1.0, 10.0);
        let mut seen = Vec::new();
        for _ in 0..4 {
            match core.schedule() {
                Scheduled::Batch(m) => seen.push(m),
                other => panic!("unexpected {other:?}"),
            }
            core.step += 1;
        }
        assert_eq!(seen, vec![0, 1, 2, 0]);
    }

    #[test]
    fn singleton_after_purge_merges_with_next() {
        // Two batches {0,1} and {2,3}; arm 1 has lost to arm 0 many times.
        let mut core = BatchedElimination::new(4, 2, 0.5, 1.0);
        let mut rows = vec![vec![0u64; 4]; 4];
        rows[0][1] = 1000;
        core.set_counts(ComparisonCounts::from_rows(&rows));
        assert_eq!(core.schedule(), Scheduled::Batch(0));
        assert_eq!(core.batches.len(), 1);
        assert_eq!(ids(core.batch(0)), vec![0, 2, 3]);
        assert_eq!(core.survivor_count(), 3);
        // Both original epochs closed, merged epoch open.
        assert_eq!(core.epochs.len(), 3);
        assert!(core.epochs[0].closed_at.is_some() && core.epochs[1].closed_at.is_some());
        assert_eq!(core.epochs[2].members, vec![0, 2, 3]);
    }

    #[test]
    fn merge_wraps_around_to_first_batch() {
        let mut core = BatchedElimination::new(4, 2, 0.5, 1.0);
        let mut rows = vec![vec![0u64; 4]; 4];
        rows[3][2] = 1000;
        core.set_counts(ComparisonCounts::from_rows(&rows));
        core.set_step(1); // t = 2 schedules batch 1
        assert_eq!(core.schedule(), Scheduled::Batch(0));
        assert_eq!(ids(core.batch(0)), vec![0, 1, 3]);
    }

    #[test]
    fn confident_cycle_keeps_one_arm() {
        let mut core = BatchedElimination::new(3, 3, 0.5, 1.0);
        let mut rows = vec![vec![0u64; 3]; 3];
        rows[1][0] = 1000;
        rows[2][1] = 1000;
        rows[0][2] = 900;
        core.set_counts(ComparisonCounts::from_rows(&rows));
        core.schedule();
        // Arm 2 lost only 900 times, so its worst UCB is the highest.
        assert_eq!(ids(core.batch(0)), vec![2]);
        assert_eq!(core.survivor_count(), 1);
        assert!(core.is_finished());
    }

    #[test]
    fn stage_threshold() {
        let mut core = BatchedElimination::new(16, 4, 1.0, 10.0);
        core.survivors = 9;
        assert!(!core.maybe_repartition());
        core.batches = vec![
            vec![ArmId(0), ArmId(1)],
            vec![ArmId(5), ArmId(6)],
            vec![ArmId(8), ArmId(9)],
            vec![ArmId(12), ArmId(13)],
        ];
        core.survivors = 8;
        assert!(core.maybe_repartition());
        assert_eq!(core.stage(), 2);
        assert_eq!(core.batches.iter().map(Vec::len).sum::<usize>(), 8);
        for b in &core.batches {
            assert!((2..=6).contains(&b.len()), "{:?}", sizes(&core));
        }
    }

    #[test]
    fn repartition_splits_when_nothing_fits() {
        let mut core = BatchedElimination::new(20, 4, 1.0, 10.0);
        core.batches = vec![
            (0..6).map(ArmId).collect(),
            vec![ArmId(6)],
            (7..13).map(ArmId).collect(),
        ];
        core.batch_epoch = vec![0, 1, 2];
        core.survivors = 13;
        core.stage = 1;
        core.repartition();
        let s = sizes(&core);
        assert_eq!(s.iter().sum::<usize>(), 13);
        assert!(s.iter().all(|&n| (2..=6).contains(&n)), "{s:?}");
    }

    #[test]
    fn repartition_splits_oversized_batches() {
        let mut core = BatchedElimination::new(20, 4, 1.0, 10.0);
        core.batches = vec![(0..9).map(ArmId).collect(), (9..12).map(ArmId).collect()];
        core.batch_epoch = vec![0, 1];
        core.survivors = 12;
        core.repartition();
        let s = sizes(&core);
        assert!(s.iter().all(|&n| (2..=6).contains(&n)), "{s:?}");
        // The untouched batch keeps its epoch.
        assert!(core.batch_epoch.contains(&1));
        assert!(core.epochs[1].closed_at.is_none());
        assert!(core.epochs[0].closed_at.is_some());
    }

    #[test]
    fn few_survivors_collapse_into_one_batch() {
        let mut core = BatchedElimination::new(20, 8, 1.0, 10.0);
        core.batches = vec![vec![ArmId(1)], vec![ArmId(4)], vec![ArmId(7)]];
        core.batch_epoch = vec![0, 1, 2];
        core.survivors = 3;
        core.repartition();
        assert_eq!(sizes(&core), vec![3]);
    }

    #[test]
    fn epoch_pair_counts() {
        let mut core = BatchedElimination::new(4, 4, 1.0, 10.0);
        core.record(0, ArmId(2), ArmId(1));
        core.record(0, ArmId(1), ArmId(2));
        core.record(0, ArmId(3), ArmId(0));
        core.record(0, ArmId(3), ArmId(3));
        let e = &core.epochs[0];
        assert_eq!(
            e.pair_counts,
            vec![
                PairCount { first: 0, second: 3, count: 1 },
                PairCount { first: 1, second: 2, count: 2 },
            ]
        );
        assert_eq!(core.steps(), 4);
        assert_eq!(core.counts().total(), 3);
    }
}
