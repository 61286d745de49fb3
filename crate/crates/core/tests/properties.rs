use approx::assert_relative_eq;
use proptest::prelude::*;

use cbm_core::budget::QueryLedger;
use cbm_core::cbm_linear::{batch_ls_oracle, LinCbmState, OfulParams};
use cbm_core::cbm_rl::{empirical_reward_variance, RewardStats};
use cbm_core::greedy::{AnytimeLearner, AnytimeUcb, GreedyReduction};
use cbm_core::rng_stream;

fn rows_strategy() -> impl Strategy<Value = (usize, Vec<(Vec<f64>, f64, bool)>)> {
    (1usize..=5).prop_flat_map(|d| {
        let row = (prop::collection::vec(-1.0f64..1.0, d), -2.0f64..2.0, any::<bool>());
        (Just(d), prop::collection::vec(row, 1..200))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn skipping_least_squares_matches_batch((d, rows) in rows_strategy(), lambda in 0.1f64..4.0) {
        let params = OfulParams::new(d, 0.1, 0.5, 1.0, 1.0).with_lambda(lambda);
        let mut state = LinCbmState::new(params).unwrap();
        let mut kept = Vec::new();
        for (x, y, q) in rows {
            if q {
                state.update(&x, y).unwrap();
                kept.push((x, y));
                let batch = batch_ls_oracle(&kept, d, lambda).unwrap();
                for (a, b) in state.theta().iter().zip(&batch) {
                    prop_assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0));
                }
            }
            state.end_round();
        }
    }

    #[test]
    fn inverse_norm_shrinks_under_rank_one_updates(
        (d, rows) in rows_strategy(),
        probe in prop::collection::vec(-1.0f64..1.0, 5),
    ) {
        let params = OfulParams::new(d, 0.1, 0.5, 1.0, 1.0);
        let mut state = LinCbmState::new(params).unwrap();
        let probe = &probe[..d];
        let mut last = state.inv_norm_sq(probe);
        for (x, y, _) in rows {
            state.update(&x, y).unwrap();
            let now = state.inv_norm_sq(probe);
            prop_assert!(now <= last * (1.0 + 1e-9) + 1e-12);
            last = now;
        }
    }

    #[test]
    fn elliptical_potential((d, rows) in rows_strategy()) {
        // Σ min{1, ‖x_k‖²_{V_{k−1}⁻¹}} ≤ 2·d·ln(1 + n·L²/(d·λ)) with L = √d bounding the rows.
        let lambda = 1.0;
        let params = OfulParams::new(d, 0.1, 0.5, (d as f64).sqrt(), 1.0).with_lambda(lambda);
        let mut state = LinCbmState::new(params).unwrap();
        let mut total = 0.0;
        let n = rows.len() as f64;
        for (x, y, _) in rows {
            total += state.inv_norm_sq(&x).min(1.0);
            state.update(&x, y).unwrap();
        }
        let bound = 2.0 * d as f64 * (1.0 + n * d as f64 / (d as f64 * lambda)).ln();
        prop_assert!(total <= bound + 1e-9);
    }

    #[test]
    fn welford_variance_matches_two_pass(samples in prop::collection::vec(0.0f64..1.0, 0..50)) {
        let stats = RewardStats::from_samples(&samples);
        let got = empirical_reward_variance(&stats);
        if samples.len() < 2 {
            prop_assert_eq!(got, 0.0);
        } else {
            let n = samples.len() as f64;
            let mean = samples.iter().sum::<f64>() / n;
            let want = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            prop_assert!((got - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn greedy_base_equals_standalone_on_queried_subsequence(
        budgets in prop::collection::vec(0u8..3, 1..300),
        seed in any::<u64>(),
    ) {
        let mut greedy = GreedyReduction::new(AnytimeUcb::<f64>::new(2, 3).unwrap());
        let mut standalone = AnytimeUcb::<f64>::new(2, 3).unwrap();
        let mut ledger = QueryLedger::unit();
        let mut rng = rng_stream(seed, 0, "alg");
        let mut noise = rng_stream(seed, 0, "env");
        // B(1) = 1, then non-decreasing increments of 0..2.
        let mut budget = 1.0;
        for (t, inc) in budgets.iter().enumerate() {
            if t > 0 {
                budget += f64::from(*inc);
            }
            let context = t % 2;
            let had_budget = ledger.used() + 1.0 <= budget;
            let step = greedy.greedy_step(context, budget, &mut ledger, &mut rng).unwrap();
            prop_assert_eq!(step.queried, had_budget);
            if step.queried {
                let reward = if rand::Rng::random_bool(&mut noise, 0.5) { 1.0 } else { 0.0 };
                prop_assert_eq!(standalone.act(context), step.action);
                standalone.update(context, step.action, reward).unwrap();
                greedy.observe(reward).unwrap();
            }
            prop_assert!(ledger.used() <= budget);
        }
        prop_assert_eq!(greedy.base(), &standalone);
        for (j, snap) in greedy.snapshots().iter().enumerate() {
            prop_assert_eq!(snap.iterations(), j);
        }
    }
}

#[test]
fn f32_least_squares_tracks_f64() {
    let rows: Vec<(Vec<f64>, f64)> = (0..50)
        .map(|k| {
            let k = k as f64;
            (vec![(k * 0.37).sin(), (k * 0.11).cos(), 0.5], (k * 0.23).sin())
        })
        .collect();
    let mut wide = LinCbmState::new(OfulParams::new(3, 0.1, 0.5, 1.0, 1.0)).unwrap();
    let mut narrow = LinCbmState::new(OfulParams::<f32>::new(3, 0.1, 0.5, 1.0, 1.0)).unwrap();
    for (x, y) in &rows {
        wide.update(x, *y).unwrap();
        let x32: Vec<f32> = x.iter().map(|v| *v as f32).collect();
        narrow.update(&x32, *y as f32).unwrap();
    }
    for (a, b) in wide.theta().iter().zip(narrow.theta()) {
        assert_relative_eq!(*a, f64::from(*b), epsilon = 1e-4);
    }
}
