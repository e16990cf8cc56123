use duelbench::baselines::{PolicyKind, PolicySpec};
use duelbench::environments::{check_assumptions, gen_random_condorcet, Environment, RegretMode};
use duelbench::mergedts::{purge_batch, MergeDts, MergeDtsParams};
use duelbench::regret::step_regret;
use duelbench::runner::default_checkpoints;
use duelbench::sampling::{stream_rng, Stream};
use duelbench::winners::{borda_scores, condorcet_winner, copeland_scores};
use duelbench::{ArmId, DuelPolicy, PreferenceMatrix};
use proptest::prelude::*;

fn matrix_strategy() -> impl Strategy<Value = PreferenceMatrix> {
    (2usize..8).prop_flat_map(|k| {
        prop::collection::vec(0.0f64..=1.0, k * (k - 1) / 2).prop_map(move |upper| {
            let mut rows = vec![vec![0.5; k]; k];
            let mut it = upper.into_iter();
            for i in 0..k {
                for j in (i + 1)..k {
                    let p = it.next().unwrap();
                    rows[i][j] = p;
                    rows[j][i] = 1.0 - p;
                }
            }
            PreferenceMatrix::from_rows(&rows).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn csv_and_json_round_trip(m in matrix_strategy()) {
        let csv = PreferenceMatrix::from_csv_str(&m.to_csv_string()).unwrap();
        let json = PreferenceMatrix::from_json_str(&m.to_json_string()).unwrap();
        prop_assert_eq!(&csv, &m);
        prop_assert_eq!(&json, &m);
    }

    #[test]
    fn borda_and_copeland_are_consistent(m in matrix_strategy()) {
        let k = m.k() as f64;
        let borda = borda_scores(&m);
        // Each unordered pair contributes exactly 1, the diagonal 0.5 each.
        let total: f64 = borda.iter().sum();
        prop_assert!((total - k * k / 2.0).abs() < 1e-9);
        for s in copeland_scores(&m) {
            prop_assert!((0.0..=1.0).contains(&s));
        }
        if let Some(c) = condorcet_winner(&m) {
            prop_assert_eq!(copeland_scores(&m)[c.0], 1.0);
        }
    }

    #[test]
    fn condorcet_step_regret_is_bounded(
        k in 2usize..12,
        delta in 0.01f64..0.5,
        seed in any::<u64>(),
        i in 0usize..12,
        j in 0usize..12,
    ) {
        let m = gen_random_condorcet(k, delta, 0.0, seed).unwrap();
        let (i, j) = (ArmId(i % k), ArmId(j % k));
        let r = step_regret(&m, ArmId(0), i, j).unwrap();
        let max = (0..k).map(|a| m.get(0, a) - 0.5).fold(0.0, f64::max);
        prop_assert!(r >= 0.0 && r <= max + 1e-15);
        prop_assert_eq!(step_regret(&m, ArmId(0), ArmId(0), ArmId(0)).unwrap(), 0.0);
    }

    #[test]
    fn generated_instances_meet_assumptions(
        k in 3usize..30,
        delta in 0.01f64..0.5,
        frac in 0.0f64..=0.33,
        seed in any::<u64>(),
    ) {
        let m = gen_random_condorcet(k, delta, frac, seed).unwrap();
        prop_assert_eq!(condorcet_winner(&m), Some(ArmId(0)));
        prop_assert!((m.get(0, 1) - 0.5 - delta).abs() < 1e-12);
        for i in 0..k {
            for j in 0..k {
                let g = (m.get(i, j) - 0.5).abs();
                prop_assert!(g == 0.0 || g >= delta - 1e-12);
            }
        }
        let report = check_assumptions(&m);
        prop_assert!(report.ties_only_among_uninformative);
        prop_assert!(report.uninformative_cap_holds);
        // A lone generated uninformative arm has no tie partner, so the
        // report only counts them in groups of two or more.
        let n = (frac * k as f64 + 1e-9).floor() as usize;
        prop_assert_eq!(report.uninformative.len(), if n >= 2 { n } else { 0 });
    }

    #[test]
    fn purge_partitions_batch(
        u in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 6), 6),
        size in 1usize..=6,
    ) {
        let batch: Vec<ArmId> = (0..size).map(ArmId).collect();
        let (kept, removed) = purge_batch(&batch, &u);
        prop_assert_eq!(kept.len() + removed.len(), size);
        for a in &kept {
            prop_assert!(!removed.contains(a));
        }
        if size == 1 {
            prop_assert_eq!(kept, batch);
        }
    }

    #[test]
    fn checkpoint_grid_is_valid(h in 1u64..10_000_000) {
        let cps = default_checkpoints(h);
        prop_assert_eq!(*cps.last().unwrap(), h);
        prop_assert!(cps.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(cps.len() <= 51);
    }
}

fn every_policy() -> Vec<PolicySpec> {
    vec![
        PolicySpec::new(PolicyKind::MergeDts),
        PolicySpec::new(PolicyKind::MergeDts)
            .with("alpha", 0.8f64.powi(6))
            .with("batch_size", 16)
            .with("c_override", 4.0e6),
        PolicySpec::new(PolicyKind::MergeRucb),
        PolicySpec::new(PolicyKind::Rucb),
        PolicySpec::new(PolicyKind::Dts),
        PolicySpec::new(PolicyKind::SelfSparring),
    ]
}

#[test]
fn policies_only_choose_valid_pairs() {
    for k in [2, 3, 7, 40] {
        let m = gen_random_condorcet(k, 0.05, 0.0, k as u64).unwrap();
        let env = Environment::new(m, RegretMode::Condorcet).unwrap();
        for spec in every_policy() {
            let mut p = spec.build(k, 5000).unwrap();
            let mut prng = stream_rng(1, Stream::Policy);
            let mut erng = stream_rng(1, Stream::Environment);
            for step in 1..=5000u64 {
                let c = p.select(&mut prng);
                assert!(c.first.0 < k && c.second.0 < k, "{:?} k={k}", spec.kind);
                assert_eq!(c.is_self_duel, c.first == c.second);
                let w = env.duel(c.first, c.second, &mut erng);
                p.record(&c, w).unwrap();
                assert_eq!(p.steps(), step);
            }
            if let Some(w) = p.winner() {
                assert!(w.0 < k);
            }
        }
    }
}

#[test]
fn finished_merge_policy_self_duels() {
    let m = gen_random_condorcet(6, 0.3, 0.0, 4).unwrap();
    let env = Environment::new(m, RegretMode::Condorcet).unwrap();
    let mut p = MergeDts::new(6, MergeDtsParams::theoretical(100_000)).unwrap();
    let mut prng = stream_rng(2, Stream::Policy);
    let mut erng = stream_rng(2, Stream::Environment);
    for _ in 0..100_000 {
        let c = p.select_pair(&mut prng);
        let w = env.duel(c.first, c.second, &mut erng);
        p.record_outcome(&c, w).unwrap();
    }
    let winner = p.winner().expect("easy instance finishes");
    assert_eq!(winner, ArmId(0));
    let c = p.select_pair(&mut prng);
    assert!(c.is_self_duel);
    assert_eq!((c.first, c.second), (winner, winner));
}

#[test]
fn checkpoint_resume_matches_uninterrupted_run() {
    let m = gen_random_condorcet(24, 0.05, 0.25, 9).unwrap();
    let env = Environment::new(m, RegretMode::Condorcet).unwrap();
    let params = MergeDtsParams::tuned(40_000);
    let mut straight = MergeDts::new(24, params.clone()).unwrap();
    let mut resumed = MergeDts::new(24, params).unwrap();
    let mut rng_a = stream_rng(5, Stream::Policy);
    let mut erng_a = stream_rng(5, Stream::Environment);
    let mut rng_b = rng_a.clone();
    let mut erng_b = erng_a.clone();
    for step in 0..40_000 {
        if step % 10_000 == 0 {
            resumed = MergeDts::from_json(&resumed.to_json()).unwrap();
        }
        let a = straight.select_pair(&mut rng_a);
        let b = resumed.select_pair(&mut rng_b);
        assert_eq!(a, b, "diverged at step {step}");
        straight.record_outcome(&a, env.duel(a.first, a.second, &mut erng_a)).unwrap();
        resumed.record_outcome(&b, env.duel(b.first, b.second, &mut erng_b)).unwrap();
    }
    assert_eq!(straight, resumed);
}
