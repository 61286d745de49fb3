//! Episode loop of CBM-UCBVI and CBM-ULCVI.

use serde::{Deserialize, Serialize};

use crate::budget::QueryLedger;
use crate::cbm_mab::QueryRule;
use crate::env::TabularMdp;
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::scalar::Scalar;

use super::bonus::{log_term, rl_reward_bonus, rl_should_query, ucbvi_transition_bonus, ulcvi_transition_bonus, RlVariant};
use super::counts::RlCounts;
use super::vi::{optimistic_pessimistic_vi, truncated_vi, ValueTables};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlConfig<T> {
    pub variant: RlVariant,
    pub delta: T,
    /// Known `|L_R|` or an upper bound on it; `S·A·H` when absent.
    pub reward_support: Option<usize>,
    pub query: QueryRule,
}

impl<T: Scalar> RlConfig<T> {
    pub fn new(variant: RlVariant, delta: T) -> Self {
        Self { variant, delta, reward_support: None, query: QueryRule::Cbm }
    }
}

/// What happened in one episode.
#[derive(Debug, Clone)]
pub struct Episode<T> {
    pub states: Vec<usize>,
    pub actions: Vec<usize>,
    pub queried: Vec<bool>,
    /// Plan the episode was played with.
    pub tables: ValueTables<T>,
    pub budget: T,
}

impl<T> Episode<T> {
    pub fn queries(&self) -> u32 {
        self.queried.iter().filter(|&&q| q).count() as u32
    }
}

#[derive(Debug, Clone)]
pub struct CbmRlAgent<T> {
    config: RlConfig<T>,
    counts: RlCounts<T>,
    support_size: usize,
    episode: usize,
}

impl<T: Scalar> CbmRlAgent<T> {
    pub fn new(states: usize, actions: usize, horizon: usize, config: RlConfig<T>) -> Result<Self> {
        if states == 0 || actions == 0 || horizon == 0 {
            return Err(Error::InvalidParameter("S, A and H must be positive".into()));
        }
        if !(config.delta > T::zero() && config.delta < T::one()) {
            return Err(Error::InvalidParameter("δ must lie in (0, 1)".into()));
        }
        let support_size = config.reward_support.unwrap_or(states * actions * horizon);
        Ok(Self { config, counts: RlCounts::new(states, actions, horizon), support_size, episode: 1 })
    }

    pub fn config(&self) -> &RlConfig<T> {
        &self.config
    }

    pub fn counts(&self) -> &RlCounts<T> {
        &self.counts
    }

    /// Index `t` of the next episode (1-based).
    pub fn episode(&self) -> usize {
        self.episode
    }

    pub fn log_term(&self) -> T {
        let c = &self.counts;
        log_term(self.config.variant, c.states(), c.actions(), c.horizon(), self.episode, self.config.delta)
    }

    /// `CI^R_{t,h}(s,a) = 2·b^r_{t,h}(s,a)`.
    pub fn reward_ci(&self, h: usize, s: usize, a: usize) -> T {
        let c = &self.counts;
        T::lit(2.0) * rl_reward_bonus(c.reward_variance(h, s, a), c.queries(h, s, a), self.log_term())
    }

    /// Optimistic (and for ULCVI pessimistic) tables for the current episode.
    pub fn plan(&self) -> ValueTables<T> {
        let c = &self.counts;
        let (ns, na, nh) = (c.states(), c.actions(), c.horizon());
        let l = self.log_term();
        let mut means = Vec::with_capacity(nh * ns * na);
        let mut reward_bonus = Vec::with_capacity(nh * ns * na);
        for h in 0..nh {
            for s in 0..ns {
                for a in 0..na {
                    means.push(c.mean_reward(h, s, a));
                    reward_bonus.push(rl_reward_bonus(c.reward_variance(h, s, a), c.queries(h, s, a), l));
                }
            }
        }
        match self.config.variant {
            RlVariant::Ucbvi => {
                let mut bonused = means;
                for h in 0..nh {
                    for s in 0..ns {
                        for a in 0..na {
                            let i = (h * ns + s) * na + a;
                            bonused[i] += reward_bonus[i] + ucbvi_transition_bonus(c.visits(h, s, a), nh, l);
                        }
                    }
                }
                truncated_vi(c, &bonused)
            }
            RlVariant::Ulcvi => optimistic_pessimistic_vi(c, &means, &reward_bonus, |h, s, a, upper, lower| {
                ulcvi_transition_bonus(c.visits(h, s, a), &c.transition_row(h, s, a), upper, lower, nh, l)
            }),
        }
    }

    /// Plays one episode from `initial_state`, then decides which visited
    /// steps to query (in step order, all against the same `budget`), and
    /// finally folds the observations into the counts.
    pub fn run_episode(
        &mut self,
        env: &TabularMdp<T>,
        initial_state: usize,
        budget: T,
        ledger: &mut QueryLedger<T>,
        rng: &mut Stream,
    ) -> Result<Episode<T>> {
        let (ns, na, nh) = (self.counts.states(), self.counts.actions(), self.counts.horizon());
        if env.states() != ns || env.actions() != na || env.horizon() != nh {
            return Err(Error::InvalidEnvironment("MDP dimensions differ from the agent's".into()));
        }
        if initial_state >= ns {
            return Err(Error::InvalidParameter(format!("initial state {initial_state} out of range")));
        }
        let tables = self.plan();

        let mut states = Vec::with_capacity(nh);
        let mut actions = Vec::with_capacity(nh);
        let mut rewards = Vec::with_capacity(nh);
        let mut s = initial_state;
        for h in 0..nh {
            let a = tables.action(h, s);
            states.push(s);
            actions.push(a);
            rewards.push(env.sample_reward(h, s, a, rng));
            if h + 1 < nh {
                s = env.sample_next(h, s, a, rng);
            }
        }

        let l = self.log_term();
        let mut queried = vec![false; nh];
        for h in 0..nh {
            let (s, a) = (states[h], actions[h]);
            // The CBM rule is charged unguarded so that an overspend surfaces
            // as an error instead of being silently clipped.
            queried[h] = match self.config.query {
                QueryRule::Always => ledger.can_afford(0, budget),
                QueryRule::Cbm => rl_should_query(self.reward_ci(h, s, a), self.support_size, budget, ns, na, nh, l),
            };
            if queried[h] {
                ledger.charge(0, budget, self.episode)?;
            }
        }

        for h in 0..nh {
            let (s, a) = (states[h], actions[h]);
            self.counts.record_visit(h, s, a);
            if h + 1 < nh {
                self.counts.record_transition(h, s, a, states[h + 1]);
            }
            if queried[h] {
                self.counts.record_reward(h, s, a, rewards[h]);
            }
        }
        self.episode += 1;
        Ok(Episode { states, actions, queried, tables, budget })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_stream;

    /// Single path: one state, one action.
    fn single_path(horizon: usize) -> TabularMdp<f64> {
        TabularMdp::new(
            vec![vec![vec![vec![1.0]]]; horizon],
            vec![vec![vec![0.5]]; horizon],
            vec![1.0],
        )
        .unwrap()
    }

    #[test]
    fn deterministic_path() {
        let env = single_path(3);
        let mut agent = CbmRlAgent::new(1, 1, 3, RlConfig::new(RlVariant::Ucbvi, 0.1)).unwrap();
        let mut ledger = QueryLedger::unit();
        let mut rng = rng_stream(0, 0, "env");
        let ep = agent.run_episode(&env, 0, 0.0, &mut ledger, &mut rng).unwrap();
        assert_eq!(ep.states, vec![0, 0, 0]);
        assert_eq!(ep.actions, vec![0, 0, 0]);
    }

    #[test]
    fn zero_budget_still_learns_transitions() {
        let mut rng = rng_stream(1, 0, "instance");
        let env = TabularMdp::<f64>::random(3, 2, 3, 0.5, 1.0, &mut rng).unwrap();
        for variant in [RlVariant::Ucbvi, RlVariant::Ulcvi] {
            let mut agent = CbmRlAgent::new(3, 2, 3, RlConfig::new(variant, 0.1)).unwrap();
            let mut ledger = QueryLedger::unit();
            for _ in 0..20 {
                let ep = agent.run_episode(&env, 0, 0.0, &mut ledger, &mut rng).unwrap();
                assert_eq!(ep.queries(), 0);
            }
            let visits: usize = (0..3)
                .flat_map(|h| (0..3).flat_map(move |s| (0..2).map(move |a| (h, s, a))))
                .map(|(h, s, a)| agent.counts().visits(h, s, a))
                .sum();
            assert_eq!(visits, 20 * 3);
            assert_eq!(agent.counts().total_queries(), 0);
        }
    }

    #[test]
    fn full_feedback_queries_every_step() {
        let mut rng = rng_stream(2, 0, "instance");
        let env = TabularMdp::<f64>::random(3, 2, 4, 0.5, 1.0, &mut rng).unwrap();
        let mut config = RlConfig::new(RlVariant::Ucbvi, 0.1);
        config.query = QueryRule::Always;
        let mut agent = CbmRlAgent::new(3, 2, 4, config).unwrap();
        let mut ledger = QueryLedger::unit();
        for t in 1..=10 {
            let ep = agent.run_episode(&env, 0, 1e9, &mut ledger, &mut rng).unwrap();
            assert_eq!(ep.queries(), 4);
            assert_eq!(agent.counts().total_queries(), 4 * t);
        }
        assert!(agent.counts().queries_within_visits());
    }

    #[test]
    fn queries_only_visited_tuples() {
        let mut rng = rng_stream(3, 0, "instance");
        let env = TabularMdp::<f64>::random(4, 2, 4, 0.5, 1.0, &mut rng).unwrap();
        let mut agent = CbmRlAgent::new(4, 2, 4, RlConfig::new(RlVariant::Ulcvi, 0.1)).unwrap();
        let mut ledger = QueryLedger::unit();
        for t in 1..=50 {
            let before = agent.counts().clone();
            let ep = agent.run_episode(&env, t % 4, 4.0 * t as f64, &mut ledger, &mut rng).unwrap();
            for h in 0..4 {
                for s in 0..4 {
                    for a in 0..2 {
                        let dq = agent.counts().queries(h, s, a) - before.queries(h, s, a);
                        let on_path = ep.states[h] == s && ep.actions[h] == a;
                        assert_eq!(dq, usize::from(on_path && ep.queried[h]));
                    }
                }
            }
            assert!(ledger.used() <= 4.0 * t as f64);
        }
    }
}
