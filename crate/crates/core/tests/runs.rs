use cbm_core::adversary::{make_funded_context_adversary, AdversaryMode};
use cbm_core::budget::{BudgetProfile, BudgetSchedule, QueryLedger};
use cbm_core::cbm_linear::OfulParams;
use cbm_core::cbm_rl::{RlConfig, RlVariant};
use cbm_core::context::{CategoricalContexts, ContextLaw, FixedContext};
use cbm_core::env::{ActionSets, LinBanditEnv, LinearNoise, MabEnv, TabularMdp};
use cbm_core::sim::{run_cbm_oful, run_cbm_rl, run_cbm_ucb, Feedback};
use cbm_core::{rng_stream, QueryRule, RunStreams, Trace};

fn schedules() -> Vec<(&'static str, BudgetSchedule<f64>, Box<dyn ContextLaw<f64>>)> {
    let (adaptive, contexts) = make_funded_context_adversary(AdversaryMode::ContextAdversary);
    vec![
        ("fixed", BudgetSchedule::fixed(5.0), Box::new(FixedContext(0))),
        ("linear", BudgetSchedule::profile(BudgetProfile::Linear { epsilon: 0.25 }), Box::new(FixedContext(0))),
        ("poly", BudgetSchedule::profile(BudgetProfile::Polynomial { exponent: 0.5 }), Box::new(FixedContext(0))),
        ("periodic", BudgetSchedule::profile(BudgetProfile::Periodic { initial: 3.0, period: 10 }), Box::new(FixedContext(0))),
        ("adaptive", adaptive, Box::new(contexts)),
    ]
}

fn assert_feasible(trace: &Trace) {
    trace.validate().unwrap();
    for row in trace.rows() {
        assert!(row.budget_used <= row.budget, "round {}", row.t);
    }
}

#[test]
fn mab_runs_stay_within_budget_with_costs() {
    let env = MabEnv::evenly_spaced(4, 0.2, 0.8).unwrap();
    for (name, mut schedule, mut contexts) in schedules() {
        let mut streams = RunStreams::new(11, 0);
        let ledger = QueryLedger::with_costs(vec![1.0, 0.5, 2.0, 1.0]).unwrap();
        let trace = run_cbm_ucb(
            &env,
            QueryRule::Cbm,
            ledger,
            Feedback::new(&mut schedule, contexts.as_mut()),
            3000,
            &mut streams,
        )
        .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_feasible(&trace);
    }
}

#[test]
fn mab_confidence_intervals_cover() {
    let env = MabEnv::evenly_spaced(5, 0.1, 0.9).unwrap();
    let arms = env.arms();
    let (mut misses, mut total) = (0usize, 0usize);
    for seed in 0..50 {
        let mut schedule = BudgetSchedule::profile(BudgetProfile::Linear { epsilon: arms as f64 });
        let mut contexts = FixedContext(0);
        let mut streams = RunStreams::new(seed, 0);
        let trace = run_cbm_ucb(
            &env,
            QueryRule::Cbm,
            QueryLedger::unit(),
            Feedback::new(&mut schedule, &mut contexts),
            1000,
            &mut streams,
        )
        .unwrap();
        // Means rebuilt from the queried rewards in the trace.
        let mut n = vec![0usize; arms];
        let mut sum = vec![0.0; arms];
        for row in trace.rows() {
            let t = row.t as f64;
            for a in 0..arms {
                if n[a] == 0 {
                    continue;
                }
                let bonus = (3.0 * (arms as f64 * t).ln() / (2.0 * n[a] as f64)).sqrt();
                total += 1;
                if (sum[a] / n[a] as f64 - env.means()[a]).abs() > bonus {
                    misses += 1;
                }
            }
            if let Some(r) = row.reward {
                n[row.action] += 1;
                sum[row.action] += r;
            }
        }
    }
    assert!(total > 0);
    assert!((misses as f64) < 0.05 * total as f64, "{misses}/{total}");
}

#[test]
fn full_mab_budget_queries_below_count_threshold() {
    let env = MabEnv::evenly_spaced(3, 0.3, 0.7).unwrap();
    let mut schedule = BudgetSchedule::profile(BudgetProfile::Linear { epsilon: 3.0 });
    let mut contexts = FixedContext(0);
    let mut streams = RunStreams::new(5, 0);
    let trace = run_cbm_ucb(
        &env,
        QueryRule::Cbm,
        QueryLedger::unit(),
        Feedback::new(&mut schedule, &mut contexts),
        4000,
        &mut streams,
    )
    .unwrap();
    let mut n = [0usize; 3];
    for row in trace.rows() {
        let fires = 16 * n[row.action].max(1) <= row.t;
        assert_eq!(row.queries == 1, fires, "round {}", row.t);
        n[row.action] += row.queries as usize;
    }
}

#[test]
fn linear_runs_stay_within_budget() {
    let env = LinBanditEnv::new(
        vec![0.4, -0.3, 0.2],
        LinearNoise::Gaussian { sd: 0.2 },
        ActionSets::RandomSphere { count: 8, radius: 1.0 },
    )
    .unwrap();
    for (name, mut schedule, mut contexts) in schedules() {
        let mut streams = RunStreams::new(2, 1);
        let params = OfulParams::new(3, 0.1, 0.2, 1.0, env.theta_norm());
        let trace =
            run_cbm_oful(&env, params, QueryRule::Cbm, Feedback::new(&mut schedule, contexts.as_mut()), 2000, &mut streams)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_feasible(&trace);
    }
}

#[test]
fn rl_runs_stay_within_budget_and_query_visited_tuples() {
    let mut rng = rng_stream(8, 0, "instance");
    let mdp = TabularMdp::<f64>::random(4, 2, 4, 0.5, 1.0, &mut rng).unwrap();
    for variant in [RlVariant::Ucbvi, RlVariant::Ulcvi] {
        for (name, mut schedule, contexts) in schedules() {
            let mut streams = RunStreams::new(4, 0);
            let mut contexts: Box<dyn ContextLaw<f64>> =
                if name == "adaptive" { contexts } else { Box::new(CategoricalContexts(mdp.initial().to_vec())) };
            let mut queried = 0u64;
            let trace = run_cbm_rl(
                &mdp,
                RlConfig::new(variant, 0.1),
                Feedback::new(&mut schedule, contexts.as_mut()),
                300,
                &mut streams,
                |ep| queried += u64::from(ep.queries()),
            )
            .unwrap_or_else(|e| panic!("{variant:?} {name}: {e}"));
            assert_feasible(&trace);
            assert_eq!(trace.total_queries(), queried);
        }
    }
}

#[test]
fn identical_seeds_give_identical_traces() {
    let env = MabEnv::evenly_spaced(4, 0.2, 0.8).unwrap();
    let run = || {
        let (mut schedule, mut contexts) = make_funded_context_adversary(AdversaryMode::BudgetAdversary);
        let mut streams = RunStreams::new(77, 3);
        run_cbm_ucb(&env, QueryRule::Cbm, QueryLedger::unit(), Feedback::new(&mut schedule, &mut contexts), 500, &mut streams)
            .unwrap()
    };
    assert_eq!(run(), run());
}
