//! Run loops that wire a learner, an environment, a budget schedule and a
//! context source into a trace.
//!
//! Every loop follows the same order within a round: the context is revealed,
//! then `B(t)`, then the learner acts, then the environment draws the reward
//! (always, so that the environment stream stays aligned across learners),
//! then the learner decides whether to query.

use crate::budget::{BudgetSchedule, QueryLedger};
use crate::cbm_linear::{LinCbmState, OfulParams};
use crate::cbm_mab::{MabCbmState, QueryRule};
use crate::cbm_rl::{optimal_values, policy_values, CbmRlAgent, Episode, RlConfig};
use crate::context::ContextLaw;
use crate::env::{ActionSets, CmabEnv, LinBanditEnv, MabEnv, TabularMdp};
use crate::error::{Error, Result};
use crate::greedy::{AnytimeUcb, GreedyReduction};
use crate::rng::RunStreams;
use crate::scalar::Scalar;
use crate::trace::RunTrace;

/// Budget source and context source of a run.
pub struct Feedback<'a, T> {
    pub schedule: &'a mut BudgetSchedule<T>,
    pub contexts: &'a mut dyn ContextLaw<T>,
}

impl<'a, T: Scalar> Feedback<'a, T> {
    pub fn new(schedule: &'a mut BudgetSchedule<T>, contexts: &'a mut dyn ContextLaw<T>) -> Self {
        Self { schedule, contexts }
    }

    fn reveal(&mut self, t: usize, trace: &RunTrace<T>, streams: &mut RunStreams) -> Result<(usize, T)> {
        let context = self.contexts.next_context(t, trace, &mut streams.adversary);
        let budget = self.schedule.advance_budget(t, trace, context, &mut streams.adversary)?;
        Ok((context, budget))
    }
}

/// CBM-UCB (or plain UCB with [`QueryRule::Always`]) on a stochastic MAB.
/// Contexts only drive the budget; the arms do not depend on them.
pub fn run_cbm_ucb<T: Scalar>(
    env: &MabEnv<T>,
    rule: QueryRule,
    mut ledger: QueryLedger<T>,
    mut feedback: Feedback<'_, T>,
    horizon: usize,
    streams: &mut RunStreams,
) -> Result<RunTrace<T>> {
    let mut state = MabCbmState::new(env.arms(), ledger.total_cost(env.arms()))?;
    let mut trace = RunTrace::with_capacity(horizon);
    for t in 1..=horizon {
        let (context, budget) = feedback.reveal(t, &trace, streams)?;
        let arm = state.select();
        let reward = env.sample(arm, &mut streams.env);
        let query = match rule {
            QueryRule::Cbm => state.should_query(arm, budget),
            QueryRule::Always => ledger.can_afford(arm, budget),
        };
        if query {
            ledger.charge(arm, budget, t)?;
            state.update(arm, reward)?;
        }
        trace.push(context, arm, u32::from(query), query.then_some(reward), budget, ledger.used(), env.regret(arm))?;
        state.end_round();
    }
    Ok(trace)
}

/// Greedy reduction around anytime UCB on a contextual bandit.
pub fn run_greedy<T: Scalar>(
    env: &CmabEnv<T>,
    mut ledger: QueryLedger<T>,
    mut feedback: Feedback<'_, T>,
    horizon: usize,
    streams: &mut RunStreams,
) -> Result<RunTrace<T>> {
    let mut greedy = GreedyReduction::new(AnytimeUcb::new(env.contexts(), env.arms())?);
    let mut trace = RunTrace::with_capacity(horizon);
    for t in 1..=horizon {
        let (context, budget) = feedback.reveal(t, &trace, streams)?;
        check_context(context, env.contexts())?;
        let step = greedy.greedy_step(context, budget, &mut ledger, &mut streams.algorithm)?;
        let reward = env.sample(context, step.action, &mut streams.env);
        if step.queried {
            greedy.observe(reward)?;
        }
        trace.push(
            context,
            step.action,
            u32::from(step.queried),
            step.queried.then_some(reward),
            budget,
            ledger.used(),
            env.regret(context, step.action),
        )?;
    }
    Ok(trace)
}

/// CBM-OFUL (or OFUL with [`QueryRule::Always`]) with unit query costs.
pub fn run_cbm_oful<T: Scalar>(
    env: &LinBanditEnv<T>,
    params: OfulParams<T>,
    rule: QueryRule,
    mut feedback: Feedback<'_, T>,
    horizon: usize,
    streams: &mut RunStreams,
) -> Result<RunTrace<T>> {
    if params.dim != env.dim() {
        return Err(Error::InvalidParameter("OFUL dimension differs from the environment's".into()));
    }
    let mut state = LinCbmState::new(params)?;
    let mut ledger = QueryLedger::unit();
    let mut trace = RunTrace::with_capacity(horizon);
    for t in 1..=horizon {
        let (context, budget) = feedback.reveal(t, &trace, streams)?;
        if let ActionSets::OneHot { contexts, .. } = env.action_sets() {
            check_context(context, *contexts)?;
        }
        let actions = env.action_set(context, &mut streams.adversary);
        if actions.is_empty() {
            return Err(Error::InvalidEnvironment(format!("empty action set at round {t}")));
        }
        let i = state.select(&actions);
        let x = &actions[i];
        let reward = env.sample(x, &mut streams.env);
        let query = match rule {
            QueryRule::Cbm => state.should_query(x, budget),
            QueryRule::Always => ledger.can_afford(0, budget),
        };
        if query {
            ledger.charge(0, budget, t)?;
            state.update(x, reward)?;
        }
        trace.push(context, i, u32::from(query), query.then_some(reward), budget, ledger.used(), env.regret(&actions, i))?;
        state.end_round();
    }
    Ok(trace)
}

/// CBM-UCBVI / CBM-ULCVI over `episodes` episodes. The context of an episode
/// is its initial state. `on_episode` sees every episode after it is played.
///
/// The trace's `action` column holds the first action of the episode and
/// `query` the number of steps queried; the regret is `V*₁(s₁) − V^{π_t}₁(s₁)`.
pub fn run_cbm_rl<T: Scalar>(
    env: &TabularMdp<T>,
    config: RlConfig<T>,
    mut feedback: Feedback<'_, T>,
    episodes: usize,
    streams: &mut RunStreams,
    mut on_episode: impl FnMut(&Episode<T>),
) -> Result<RunTrace<T>> {
    let mut agent = CbmRlAgent::new(env.states(), env.actions(), env.horizon(), config)?;
    let optimal = optimal_values(env);
    let mut ledger = QueryLedger::unit();
    let mut trace = RunTrace::with_capacity(episodes);
    for t in 1..=episodes {
        let (initial, budget) = feedback.reveal(t, &trace, streams)?;
        check_context(initial, env.states())?;
        let episode = agent.run_episode(env, initial, budget, &mut ledger, &mut streams.env)?;
        let achieved = policy_values(env, &episode.tables.policy).v(0, initial);
        let regret = (optimal.v(0, initial) - achieved).max(T::zero());
        trace.push(initial, episode.actions[0], episode.queries(), None, budget, ledger.used(), regret)?;
        on_episode(&episode);
    }
    Ok(trace)
}

fn check_context(context: usize, count: usize) -> Result<()> {
    if context >= count {
        return Err(Error::InvalidEnvironment(format!("context {context} out of range 0..{count}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{make_funded_context_adversary, funded_context_env, AdversaryMode};
    use crate::budget::BudgetProfile;
    use crate::context::FixedContext;

    #[test]
    fn zero_budget_never_queries() {
        let env = MabEnv::evenly_spaced(4, 0.2, 0.8).unwrap();
        let mut schedule = BudgetSchedule::fixed(0.0);
        let mut contexts = FixedContext(0);
        let mut streams = RunStreams::new(1, 0);
        let trace = run_cbm_ucb(
            &env,
            QueryRule::Cbm,
            QueryLedger::unit(),
            Feedback::new(&mut schedule, &mut contexts),
            100,
            &mut streams,
        )
        .unwrap();
        assert_eq!(trace.len(), 100);
        assert_eq!(trace.total_queries(), 0);
    }

    #[test]
    fn greedy_with_linear_budget_matches_plain_ucb() {
        let env = MabEnv::evenly_spaced(5, 0.3, 0.7).unwrap();
        let cmab = CmabEnv::new(vec![env.means().to_vec()], crate::env::RewardLaw::Bernoulli).unwrap();
        let run_greedy_once = || {
            let mut schedule = BudgetSchedule::profile(BudgetProfile::Linear { epsilon: 1.0 });
            let mut contexts = FixedContext(0);
            let mut streams = RunStreams::new(9, 2);
            run_greedy(&cmab, QueryLedger::unit(), Feedback::new(&mut schedule, &mut contexts), 500, &mut streams)
                .unwrap()
        };
        let greedy = run_greedy_once();
        assert_eq!(greedy.total_queries(), 500);

        // Plain anytime UCB on the same reward stream.
        let mut ucb = AnytimeUcb::<f64>::new(1, 5).unwrap();
        let mut streams = RunStreams::new(9, 2);
        for row in greedy.rows() {
            use crate::greedy::AnytimeLearner;
            let a = ucb.act(0);
            assert_eq!(a, row.action);
            let r = cmab.sample(0, a, &mut streams.env);
            assert_eq!(Some(r), row.reward);
            ucb.update(0, a, r).unwrap();
        }
    }

    #[test]
    fn greedy_loses_to_funded_context_adversary() {
        let env = funded_context_env::<f64>().unwrap();
        let (mut schedule, mut contexts) = make_funded_context_adversary(AdversaryMode::BudgetAdversary);
        let mut streams = RunStreams::new(3, 0);
        let trace =
            run_greedy(&env, QueryLedger::unit(), Feedback::new(&mut schedule, &mut contexts), 2000, &mut streams)
                .unwrap();
        trace.validate().unwrap();
        assert!(trace.rows().iter().filter(|r| r.context == 1).all(|r| r.queries == 0));
        assert!(trace.regret() / 2000.0 > 0.2);
    }
}
