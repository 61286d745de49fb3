//! Turns a config into an environment, a learner and per-replication
//! budget and context sources.

use cbm_core::adversary::{make_funded_context_adversary, funded_context_env};
use cbm_core::cbm_linear::OfulParams;
use cbm_core::cbm_rl::RlConfig;
use cbm_core::context::{CategoricalContexts, ContextLaw, FixedContext, UniformContexts};
use cbm_core::env::{ActionSets, CmabEnv, LinBanditEnv, LinearNoise, MabEnv, RewardLaw, TabularMdp};
use cbm_core::rng::role;
use cbm_core::sim::{run_cbm_oful, run_cbm_rl, run_cbm_ucb, run_greedy, Feedback};
use cbm_core::{rng_stream, BudgetSchedule, QueryLedger, QueryRule, RunStreams, Trace};

use crate::config::{AlgSpec, BudgetSpec, ContextSpec, EnvSpec, ExperimentConfig};
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone)]
enum Plan {
    Ucb { env: MabEnv<f64>, costs: Option<Vec<f64>>, rule: QueryRule },
    Greedy { env: CmabEnv<f64>, costs: Option<Vec<f64>> },
    Oful { env: LinBanditEnv<f64>, params: OfulParams<f64>, rule: QueryRule },
    Rl { env: TabularMdp<f64>, config: RlConfig<f64> },
}

/// A validated experiment, ready to run any replication.
#[derive(Debug, Clone)]
pub struct Prepared {
    config: ExperimentConfig,
    plan: Plan,
}

fn env_err(e: cbm_core::Error) -> HarnessError {
    HarnessError::config(format!("environment: {e}"))
}

fn mab_env(spec: &EnvSpec) -> Result<Option<MabEnv<f64>>> {
    Ok(match spec {
        EnvSpec::Mab { means, reward } => Some(MabEnv::new(means.clone(), *reward).map_err(env_err)?),
        EnvSpec::EvenlySpaced { arms, low, high, reward } => {
            let env = MabEnv::evenly_spaced(*arms, *low, *high).map_err(env_err)?;
            Some(MabEnv::new(env.means().to_vec(), *reward).map_err(env_err)?)
        }
        EnvSpec::Cmab { means, reward } if means.len() == 1 => {
            Some(MabEnv::new(means[0].clone(), *reward).map_err(env_err)?)
        }
        _ => None,
    })
}

fn cmab_parts(spec: &EnvSpec) -> Option<(Vec<Vec<f64>>, RewardLaw<f64>)> {
    match spec {
        EnvSpec::Mab { means, reward } => Some((vec![means.clone()], *reward)),
        EnvSpec::EvenlySpaced { arms, low, high, reward } => {
            let env = MabEnv::evenly_spaced(*arms, *low, *high).ok()?;
            Some((vec![env.means().to_vec()], *reward))
        }
        EnvSpec::Cmab { means, reward } => Some((means.clone(), *reward)),
        EnvSpec::FundedContext => {
            let env = funded_context_env::<f64>().ok()?;
            let means = (0..env.contexts()).map(|u| (0..env.arms()).map(|a| env.mean(u, a)).collect()).collect();
            Some((means, RewardLaw::Bernoulli))
        }
        _ => None,
    }
}

fn linear_env(spec: &EnvSpec) -> Result<Option<LinBanditEnv<f64>>> {
    if let EnvSpec::Linear { theta, noise, action_sets } = spec {
        return Ok(Some(LinBanditEnv::new(theta.clone(), *noise, action_sets.clone()).map_err(env_err)?));
    }
    // Contextual bandits embed one-hot over (context, arm) pairs.
    let Some((means, law)) = cmab_parts(spec) else { return Ok(None) };
    if law != RewardLaw::Bernoulli {
        return Err(HarnessError::config("only Bernoulli contextual bandits embed as linear bandits"));
    }
    let contexts = means.len();
    let arms = means.first().map_or(0, Vec::len);
    let theta = means.concat();
    let env = LinBanditEnv::new(theta, LinearNoise::Bernoulli, ActionSets::OneHot { contexts, arms }).map_err(env_err)?;
    Ok(Some(env))
}

fn mdp_env(spec: &EnvSpec, seed: u64) -> Result<Option<TabularMdp<f64>>> {
    Ok(match spec {
        EnvSpec::Mdp { transitions, rewards, initial } => {
            Some(TabularMdp::new(transitions.clone(), rewards.clone(), initial.clone()).map_err(env_err)?)
        }
        EnvSpec::RandomMdp { states, actions, horizon, reward_density, reward_max, instance_seed } => {
            let mut rng = rng_stream(instance_seed.unwrap_or(seed), 0, role::INSTANCE);
            Some(
                TabularMdp::random(*states, *actions, *horizon, *reward_density, *reward_max, &mut rng)
                    .map_err(env_err)?,
            )
        }
        _ => None,
    })
}

fn mismatch(alg: &AlgSpec) -> HarnessError {
    HarnessError::config(format!("algorithm {} does not apply to this environment", alg.name()))
}

fn check_costs(costs: &Option<Vec<f64>>, arms: usize) -> Result<()> {
    match costs {
        Some(c) if c.len() != arms => {
            Err(HarnessError::config(format!("{} query costs given for {arms} arms", c.len())))
        }
        Some(c) => QueryLedger::with_costs(c.clone()).map(|_| ()).map_err(|e| HarnessError::config(e.to_string())),
        None => Ok(()),
    }
}

impl Prepared {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let plan = match &config.algorithm {
            alg @ AlgSpec::CbmUcb { costs, query } => {
                let env = mab_env(&config.environment)?.ok_or_else(|| mismatch(alg))?;
                check_costs(costs, env.arms())?;
                Plan::Ucb { env, costs: costs.clone(), rule: *query }
            }
            alg @ AlgSpec::Greedy { costs } => {
                let (means, law) = cmab_parts(&config.environment).ok_or_else(|| mismatch(alg))?;
                let env = CmabEnv::new(means, law).map_err(env_err)?;
                check_costs(costs, env.arms())?;
                Plan::Greedy { env, costs: costs.clone() }
            }
            alg @ AlgSpec::CbmOful { delta, lambda, sigma, max_action_norm, theta_bound, query } => {
                let env = linear_env(&config.environment)?.ok_or_else(|| mismatch(alg))?;
                let sigma = sigma.unwrap_or(match env.noise() {
                    LinearNoise::Gaussian { sd } => sd,
                    LinearNoise::Bernoulli => 0.5,
                });
                let mut params = OfulParams::new(
                    env.dim(),
                    *delta,
                    sigma,
                    max_action_norm.unwrap_or(env.max_action_norm()),
                    theta_bound.unwrap_or(env.theta_norm()),
                );
                if let Some(l) = lambda {
                    params = params.with_lambda(*l);
                }
                params.validate().map_err(|e| HarnessError::config(e.to_string()))?;
                Plan::Oful { env, params, rule: *query }
            }
            alg @ (AlgSpec::CbmUcbvi { delta, reward_support, query }
            | AlgSpec::CbmUlcvi { delta, reward_support, query }) => {
                let env = mdp_env(&config.environment, config.seed)?.ok_or_else(|| mismatch(alg))?;
                let variant = alg.rl_variant().expect("RL algorithm");
                let rl = RlConfig { variant, delta: *delta, reward_support: *reward_support, query: *query };
                if !(*delta > 0.0 && *delta < 1.0) {
                    return Err(HarnessError::config("δ must lie in (0, 1)"));
                }
                Plan::Rl { env, config: rl }
            }
        };
        let prepared = Self { config, plan };
        prepared.check_contexts()?;
        Ok(prepared)
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn algorithm(&self) -> &'static str {
        self.config.algorithm.name()
    }

    /// Number of admissible contexts, if the environment restricts them.
    fn context_range(&self) -> Option<usize> {
        match &self.plan {
            Plan::Ucb { .. } => None,
            Plan::Greedy { env, .. } => Some(env.contexts()),
            Plan::Oful { env, .. } => match env.action_sets() {
                ActionSets::OneHot { contexts, .. } => Some(*contexts),
                _ => None,
            },
            Plan::Rl { env, .. } => Some(env.states()),
        }
    }

    fn check_contexts(&self) -> Result<()> {
        let Some(range) = self.context_range() else { return Ok(()) };
        let largest = match (&self.config.contexts, &self.config.budget) {
            (Some(ContextSpec::Fixed { context }), _) => *context + 1,
            (Some(ContextSpec::Uniform { count }), _) => *count,
            (Some(ContextSpec::Categorical { weights }), _) => weights.len(),
            (None, BudgetSpec::FundedContext { .. }) => 2,
            (None, _) => range,
        };
        if largest > range {
            return Err(HarnessError::config(format!("contexts exceed the environment's {range}")));
        }
        if let Some(ContextSpec::Categorical { weights }) = &self.config.contexts {
            let total: f64 = weights.iter().sum();
            if weights.iter().any(|w| !(*w >= 0.0)) || !((total - 1.0).abs() <= 1e-9) {
                return Err(HarnessError::config("context weights must be a probability vector"));
            }
        }
        Ok(())
    }

    fn feedback_parts(&self) -> (BudgetSchedule<f64>, Box<dyn ContextLaw<f64>>) {
        let (schedule, adversary_contexts) = match &self.config.budget {
            BudgetSpec::FundedContext { mode } => {
                let (schedule, contexts) = make_funded_context_adversary(*mode);
                (schedule, Some(Box::new(contexts) as Box<dyn ContextLaw<f64>>))
            }
            BudgetSpec::Sequence { values } => (BudgetSchedule::sequence(values.clone()), None),
            spec => (BudgetSchedule::profile(spec.profile().expect("closed-form budget")), None),
        };
        let contexts: Box<dyn ContextLaw<f64>> = match (&self.config.contexts, adversary_contexts) {
            (Some(ContextSpec::Fixed { context }), _) => Box::new(FixedContext(*context)),
            (Some(ContextSpec::Uniform { count }), _) => Box::new(UniformContexts(*count)),
            (Some(ContextSpec::Categorical { weights }), _) => Box::new(CategoricalContexts(weights.clone())),
            (None, Some(adversary)) => adversary,
            (None, None) => match &self.plan {
                Plan::Rl { env, .. } => Box::new(CategoricalContexts(env.initial().to_vec())),
                _ => match self.context_range() {
                    Some(n) if n > 1 => Box::new(UniformContexts(n)),
                    _ => Box::new(FixedContext(0)),
                },
            },
        };
        (schedule, contexts)
    }

    fn ledger(costs: &Option<Vec<f64>>) -> QueryLedger<f64> {
        match costs {
            Some(c) => QueryLedger::with_costs(c.clone()).expect("costs validated"),
            None => QueryLedger::unit(),
        }
    }

    /// Runs replication `replication` from its own seeded streams.
    pub fn run_replication(&self, replication: u64) -> Result<Trace> {
        let seed = self.config.seed;
        let horizon = self.config.horizon;
        let mut streams = RunStreams::new(seed, replication);
        let (mut schedule, mut contexts) = self.feedback_parts();
        let feedback = Feedback::new(&mut schedule, contexts.as_mut());
        let result = match &self.plan {
            Plan::Ucb { env, costs, rule } => {
                run_cbm_ucb(env, *rule, Self::ledger(costs), feedback, horizon, &mut streams)
            }
            Plan::Greedy { env, costs } => run_greedy(env, Self::ledger(costs), feedback, horizon, &mut streams),
            Plan::Oful { env, params, rule } => run_cbm_oful(env, *params, *rule, feedback, horizon, &mut streams),
            Plan::Rl { env, config } => run_cbm_rl(env, *config, feedback, horizon, &mut streams, |_| {}),
        };
        let trace = result.map_err(|e| HarnessError::from_run(self.algorithm(), seed, replication, e))?;
        trace.validate().map_err(|e| HarnessError::from_run(self.algorithm(), seed, replication, e))?;
        Ok(trace)
    }
}
