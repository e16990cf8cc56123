use serde::{Deserialize, Serialize};

use super::{RegretTrace, RunConfig, RunError};
use crate::matrix::PreferenceMatrix;
use crate::mergedts::BatchEpoch;
use crate::theory::pair_comparison_bound;
use crate::winners::subset_delta_min;

/// A distinguishable pair that was compared more often inside one batch
/// epoch than the per-batch comparison bound allows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub epoch: usize,
    pub first: usize,
    pub second: usize,
    pub count: u64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// Epochs that contained at least one distinguishable pair.
    pub epochs_checked: usize,
    /// Pairs with a nonzero count that were checked against a bound.
    pub pairs_checked: usize,
    pub violations: Vec<PairViolation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks each epoch's pair counts against `bound_fn(gap)`, where `gap` is
/// the smallest nonzero gap among the epoch's members at formation. Tied
/// pairs and epochs without any distinguishable pair are skipped.
pub fn audit_epochs(
    epochs: &[BatchEpoch],
    matrix: &PreferenceMatrix,
    bound_fn: impl Fn(f64) -> f64,
) -> AuditReport {
    let mut report = AuditReport {
        epochs_checked: 0,
        pairs_checked: 0,
        violations: Vec::new(),
    };
    for epoch in epochs {
        let Some(gap) = subset_delta_min(matrix, &epoch.members) else {
            continue;
        };
        report.epochs_checked += 1;
        let bound = bound_fn(gap);
        for pc in &epoch.pair_counts {
            if matrix.get(pc.first, pc.second) == 0.5 {
                continue;
            }
            report.pairs_checked += 1;
            if pc.count as f64 > bound {
                report.violations.push(PairViolation {
                    epoch: epoch.id,
                    first: pc.first,
                    second: pc.second,
                    count: pc.count,
                    bound,
                });
            }
        }
    }
    report
}

/// Audits a merge-family trace against `4 alpha ln(T + C) / gap_B^2`.
pub fn lemma1_audit(trace: &RegretTrace, config: &RunConfig) -> Result<AuditReport, RunError> {
    let params = config
        .policy
        .merge_params(config.horizon)?
        .ok_or(RunError::NotMergePolicy)?;
    let epochs = trace.batch_epochs.as_ref().ok_or(RunError::NotMergePolicy)?;
    let env = config.environment.realize(config.base_dir.as_deref())?;
    let c = params.resolve_constant(env.k())?;
    let horizon = config.horizon as f64;
    Ok(audit_epochs(epochs, env.matrix(), |gap| {
        pair_comparison_bound(params.alpha, horizon, c, gap).expect("gap is positive")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{PolicyKind, PolicySpec};
    use crate::environments::{EnvironmentSpec, MatrixSource};
    use crate::mergedts::PairCount;
    use crate::runner::run_single;

    fn matrix() -> PreferenceMatrix {
        PreferenceMatrix::from_rows(&[
            vec![0.5, 0.6, 0.7, 0.7],
            vec![0.4, 0.5, 0.6, 0.6],
            vec![0.3, 0.4, 0.5, 0.5],
            vec![0.3, 0.4, 0.5, 0.5],
        ])
        .unwrap()
    }

    fn epoch(members: Vec<usize>, counts: &[(usize, usize, u64)]) -> BatchEpoch {
        BatchEpoch {
            id: 0,
            members,
            opened_at: 0,
            closed_at: Some(10),
            pair_counts: counts
                .iter()
                .map(|&(first, second, count)| PairCount { first, second, count })
                .collect(),
        }
    }

    #[test]
    fn forced_bound_flags_pairs() {
        let e = epoch(vec![0, 1, 2, 3], &[(0, 1, 5), (2, 3, 40), (1, 2, 1)]);
        let report = audit_epochs(&[e], &matrix(), |_| 1.0);
        // (2, 3) is tied and (1, 2) is at the bound.
        assert_eq!(report.violations.len(), 1);
        assert_eq!((report.violations[0].first, report.violations[0].second), (0, 1));
        assert_eq!(report.pairs_checked, 2);
    }

    #[test]
    fn bound_uses_batch_gap() {
        let e = epoch(vec![0, 2], &[(0, 2, 10)]);
        let report = audit_epochs(&[e], &matrix(), |gap| {
            assert!((gap - 0.2).abs() < 1e-12);
            100.0
        });
        assert!(report.is_clean());
    }

    #[test]
    fn tied_only_epoch_is_skipped() {
        let e = epoch(vec![2, 3], &[(2, 3, 1000)]);
        let report = audit_epochs(&[e], &matrix(), |_| 1.0);
        assert_eq!(report.epochs_checked, 0);
        assert!(report.is_clean());
    }

    #[test]
    fn rejects_non_merge_policies() {
        let cfg = RunConfig::new(
            EnvironmentSpec::new(MatrixSource::Cycle),
            PolicySpec::new(PolicyKind::Rucb),
            100,
        );
        let trace = run_single(&cfg, 0).unwrap();
        assert!(matches!(lemma1_audit(&trace, &cfg), Err(RunError::NotMergePolicy)));
    }
}
