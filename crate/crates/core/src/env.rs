//! Stochastic environments with known means, used both to generate feedback
//! and to score pseudo-regret.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::scalar::Scalar;

fn invalid<R>(msg: impl Into<String>) -> Result<R> {
    Err(Error::InvalidEnvironment(msg.into()))
}

fn in_unit_interval<T: Scalar>(x: T) -> bool {
    x >= T::zero() && x <= T::one()
}

/// Law of a `[0,1]` reward with a given mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum RewardLaw<T> {
    Bernoulli,
    /// Mean plus Gaussian noise, clipped to `[0,1]`. The clipping shifts the
    /// mean for arms near the edges; pseudo-regret still uses the nominal mean.
    ClippedGaussian { sd: T },
}

impl<T: Scalar> RewardLaw<T> {
    /// Draws one reward. Consumes exactly one variate per call so that
    /// different action sequences see aligned noise streams.
    pub fn sample(&self, mean: T, rng: &mut Stream) -> T {
        match *self {
            Self::Bernoulli => {
                let u: f64 = rng.random();
                if u < mean.as_f64() { T::one() } else { T::zero() }
            }
            Self::ClippedGaussian { sd } => {
                let z: f64 = rng.sample(StandardNormal);
                (mean + sd * T::lit(z)).max(T::zero()).min(T::one())
            }
        }
    }
}

fn max_of<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().fold(T::neg_infinity(), T::max)
}

/// Stochastic multi-armed bandit.
#[derive(Debug, Clone, PartialEq)]
pub struct MabEnv<T> {
    means: Vec<T>,
    law: RewardLaw<T>,
    best: T,
}

impl<T: Scalar> MabEnv<T> {
    pub fn new(means: Vec<T>, law: RewardLaw<T>) -> Result<Self> {
        if means.is_empty() {
            return invalid("bandit needs at least one arm");
        }
        if !means.iter().all(|&m| in_unit_interval(m)) {
            return invalid("arm means must lie in [0, 1]");
        }
        let best = max_of(&means);
        Ok(Self { means, law, best })
    }

    pub fn bernoulli(means: Vec<T>) -> Result<Self> {
        Self::new(means, RewardLaw::Bernoulli)
    }

    /// `arms` means evenly spaced over `[lo, hi]`, best arm last.
    pub fn evenly_spaced(arms: usize, lo: T, hi: T) -> Result<Self> {
        if arms < 2 {
            return invalid("evenly spaced bandit needs at least two arms");
        }
        let step = (hi - lo) / T::count(arms - 1);
        Self::bernoulli((0..arms).map(|i| lo + step * T::count(i)).collect())
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[T] {
        &self.means
    }

    pub fn sample(&self, arm: usize, rng: &mut Stream) -> T {
        self.law.sample(self.means[arm], rng)
    }

    /// `r* − r(a)`.
    pub fn regret(&self, arm: usize) -> T {
        self.best - self.means[arm]
    }
}

/// Contextual bandit with finitely many contexts.
#[derive(Debug, Clone, PartialEq)]
pub struct CmabEnv<T> {
    arms: usize,
    /// Row-major `contexts × arms`.
    means: Vec<T>,
    best: Vec<T>,
    law: RewardLaw<T>,
}

impl<T: Scalar> CmabEnv<T> {
    pub fn new(means: Vec<Vec<T>>, law: RewardLaw<T>) -> Result<Self> {
        let arms = means.first().map_or(0, Vec::len);
        if arms == 0 || means.iter().any(|row| row.len() != arms) {
            return invalid("contextual bandit needs a non-empty rectangular mean table");
        }
        if !means.iter().flatten().all(|&m| in_unit_interval(m)) {
            return invalid("arm means must lie in [0, 1]");
        }
        let best = means.iter().map(|row| max_of(row)).collect();
        Ok(Self { arms, means: means.into_iter().flatten().collect(), best, law })
    }

    pub fn contexts(&self) -> usize {
        self.best.len()
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn mean(&self, context: usize, arm: usize) -> T {
        self.means[context * self.arms + arm]
    }

    pub fn sample(&self, context: usize, arm: usize, rng: &mut Stream) -> T {
        self.law.sample(self.mean(context, arm), rng)
    }

    /// `r*(u) − r(u, a)`.
    pub fn regret(&self, context: usize, arm: usize) -> T {
        self.best[context] - self.mean(context, arm)
    }
}

/// Noise model of a linear bandit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "noise", rename_all = "snake_case")]
pub enum LinearNoise<T> {
    /// `⟨x, θ*⟩ + N(0, σ²)`.
    Gaussian { sd: T },
    /// Bernoulli with mean `⟨x, θ*⟩`; requires means in `[0,1]`. This is
    /// ½-subgaussian and is what a contextual bandit embedded one-hot produces.
    Bernoulli,
}

/// How the per-round action set `X_t` is produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionSets<T> {
    /// The same finite set every round.
    Fixed { actions: Vec<Vec<T>> },
    /// Contextual bandit embedding: context `u` offers `e_{u·arms + a}` for
    /// every arm `a`, in `d = contexts·arms` dimensions.
    OneHot { contexts: usize, arms: usize },
    /// `count` vectors drawn uniformly on the sphere of the given radius.
    RandomSphere { count: usize, radius: T },
}

/// Linear bandit `R = ⟨x, θ*⟩ + η`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinBanditEnv<T> {
    theta: Vec<T>,
    noise: LinearNoise<T>,
    action_sets: ActionSets<T>,
    /// Bound `L` on `‖x‖₂`.
    max_action_norm: T,
}

pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| a * b).sum()
}

pub fn norm<T: Scalar>(x: &[T]) -> T {
    dot(x, x).sqrt()
}

impl<T: Scalar> LinBanditEnv<T> {
    pub fn new(theta: Vec<T>, noise: LinearNoise<T>, action_sets: ActionSets<T>) -> Result<Self> {
        let d = theta.len();
        if d == 0 {
            return invalid("θ* must have at least one coordinate");
        }
        let slack = T::lit(1e-12);
        let theta_norm = norm(&theta);
        let max_action_norm = match &action_sets {
            ActionSets::Fixed { actions } => {
                if actions.is_empty() || actions.iter().any(|x| x.len() != d) {
                    return invalid("fixed action set must be non-empty with dimension d");
                }
                for x in actions {
                    let m = dot(x, &theta);
                    if m.abs() > T::one() + slack {
                        return invalid("linear means must lie in [-1, 1]");
                    }
                }
                actions.iter().map(|x| norm(x)).fold(T::zero(), T::max)
            }
            ActionSets::OneHot { contexts, arms } => {
                if contexts * arms != d || *arms == 0 {
                    return invalid("one-hot embedding needs d = contexts·arms");
                }
                if theta.iter().any(|&v| v.abs() > T::one()) {
                    return invalid("linear means must lie in [-1, 1]");
                }
                T::one()
            }
            ActionSets::RandomSphere { count, radius } => {
                if *count == 0 || !(*radius > T::zero()) {
                    return invalid("random action sets need count ≥ 1 and radius > 0");
                }
                if *radius * theta_norm > T::one() + slack {
                    return invalid("radius·‖θ*‖ must be ≤ 1 so means lie in [-1, 1]");
                }
                *radius
            }
        };
        if let LinearNoise::Bernoulli = noise {
            let ok = match &action_sets {
                ActionSets::Fixed { actions } => actions.iter().all(|x| in_unit_interval(dot(x, &theta))),
                ActionSets::OneHot { .. } => theta.iter().all(|&v| in_unit_interval(v)),
                ActionSets::RandomSphere { .. } => false,
            };
            if !ok {
                return invalid("Bernoulli linear noise needs every mean in [0, 1]");
            }
        }
        Ok(Self { theta, noise, action_sets, max_action_norm })
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn max_action_norm(&self) -> T {
        self.max_action_norm
    }

    pub fn theta_norm(&self) -> T {
        norm(&self.theta)
    }

    pub fn noise(&self) -> LinearNoise<T> {
        self.noise
    }

    pub fn action_sets(&self) -> &ActionSets<T> {
        &self.action_sets
    }

    /// The action set offered at a round with the given context. Random sets
    /// draw from `rng`, which should be the adversary stream.
    pub fn action_set(&self, context: usize, rng: &mut Stream) -> Vec<Vec<T>> {
        match &self.action_sets {
            ActionSets::Fixed { actions } => actions.clone(),
            ActionSets::OneHot { arms, .. } => (0..*arms)
                .map(|a| {
                    let mut x = vec![T::zero(); self.dim()];
                    x[context * arms + a] = T::one();
                    x
                })
                .collect(),
            ActionSets::RandomSphere { count, radius } => (0..*count)
                .map(|_| {
                    let mut x: Vec<T> = (0..self.dim())
                        .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
                        .collect();
                    let n = norm(&x);
                    if n > T::zero() {
                        x.iter_mut().for_each(|v| *v = *v * *radius / n);
                    }
                    x
                })
                .collect(),
        }
    }

    pub fn mean(&self, x: &[T]) -> T {
        dot(x, &self.theta)
    }

    pub fn sample(&self, x: &[T], rng: &mut Stream) -> T {
        let mean = self.mean(x);
        match self.noise {
            LinearNoise::Gaussian { sd } => mean + sd * T::lit(rng.sample::<f64, _>(StandardNormal)),
            LinearNoise::Bernoulli => RewardLaw::Bernoulli.sample(mean, rng),
        }
    }

    /// `max_{x∈X} ⟨x,θ*⟩ − ⟨x_t,θ*⟩`.
    pub fn regret(&self, actions: &[Vec<T>], chosen: usize) -> T {
        let best = actions.iter().map(|x| self.mean(x)).fold(T::neg_infinity(), T::max);
        best - self.mean(&actions[chosen])
    }
}

/// Finite-horizon tabular MDP with non-stationary transitions and rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp<T> {
    states: usize,
    actions: usize,
    horizon: usize,
    /// `[h][s][a][s']`.
    transitions: Vec<T>,
    /// `[h][s][a]`, mean rewards.
    rewards: Vec<T>,
    initial: Vec<T>,
    reward_support: Vec<(usize, usize, usize)>,
}

impl<T: Scalar> TabularMdp<T> {
    /// `transitions[h][s][a]` is a distribution over next states and
    /// `rewards[h][s][a]` a mean reward in `[0,1]`.
    pub fn new(
        transitions: Vec<Vec<Vec<Vec<T>>>>,
        rewards: Vec<Vec<Vec<T>>>,
        initial: Vec<T>,
    ) -> Result<Self> {
        let horizon = transitions.len();
        let states = initial.len();
        let actions = transitions.first().and_then(|p| p.first()).map_or(0, Vec::len);
        if horizon == 0 || states == 0 || actions == 0 {
            return invalid("MDP needs S, A, H ≥ 1");
        }
        if rewards.len() != horizon {
            return invalid("reward table must have H layers");
        }
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
        let row_ok = |row: &[T]| {
            row.len() == states
                && row.iter().all(|&p| p >= T::zero())
                && (row.iter().copied().sum::<T>() - T::one()).abs() <= tol
        };
        if !row_ok(&initial) {
            return invalid("initial-state law must be a distribution over S");
        }
        let mut p_flat = Vec::with_capacity(horizon * states * actions * states);
        let mut r_flat = Vec::with_capacity(horizon * states * actions);
        for (p_h, r_h) in transitions.iter().zip(&rewards) {
            if p_h.len() != states || r_h.len() != states {
                return invalid("every layer needs S rows");
            }
            for (p_s, r_s) in p_h.iter().zip(r_h) {
                if p_s.len() != actions || r_s.len() != actions {
                    return invalid("every state needs A actions");
                }
                for (row, &r) in p_s.iter().zip(r_s) {
                    if !row_ok(row) {
                        return invalid("transition rows must be distributions summing to 1");
                    }
                    if !in_unit_interval(r) {
                        return invalid("mean rewards must lie in [0, 1]");
                    }
                    p_flat.extend_from_slice(row);
                    r_flat.push(r);
                }
            }
        }
        let mut mdp = Self {
            states,
            actions,
            horizon,
            transitions: p_flat,
            rewards: r_flat,
            initial,
            reward_support: Vec::new(),
        };
        mdp.reward_support = (0..horizon)
            .flat_map(|h| (0..states).flat_map(move |s| (0..actions).map(move |a| (s, a, h))))
            .filter(|&(s, a, h)| mdp.reward(h, s, a) != T::zero())
            .collect();
        Ok(mdp)
    }

    /// Random MDP: transition rows are Dirichlet(1) draws; each `(s,a,h)`
    /// carries a non-zero mean reward, drawn uniformly from `[0, reward_max]`,
    /// with probability `reward_density`.
    pub fn random(
        states: usize,
        actions: usize,
        horizon: usize,
        reward_density: f64,
        reward_max: f64,
        rng: &mut Stream,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&reward_density) || !(0.0..=1.0).contains(&reward_max) {
            return invalid("reward density and maximum must lie in [0, 1]");
        }
        let dirichlet = |rng: &mut Stream| {
            let w: Vec<f64> = (0..states).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let total: f64 = w.iter().sum();
            normalized(w.iter().map(|x| x / total))
        };
        let transitions = (0..horizon)
            .map(|_| (0..states).map(|_| (0..actions).map(|_| dirichlet(rng)).collect()).collect())
            .collect();
        let rewards = (0..horizon)
            .map(|_| {
                (0..states)
                    .map(|_| {
                        (0..actions)
                            .map(|_| {
                                let keep = rng.random::<f64>() < reward_density;
                                let r = rng.random::<f64>() * reward_max;
                                if keep { T::lit(r) } else { T::zero() }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let initial = normalized((0..states).map(|_| 1.0 / states as f64));
        Self::new(transitions, rewards, initial)
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Tuples `(s, a, h)` with non-zero mean reward (0-based `h`).
    pub fn reward_support(&self) -> &[(usize, usize, usize)] {
        &self.reward_support
    }

    pub fn initial(&self) -> &[T] {
        &self.initial
    }

    #[inline]
    pub fn reward(&self, h: usize, s: usize, a: usize) -> T {
        self.rewards[(h * self.states + s) * self.actions + a]
    }

    #[inline]
    pub fn transition(&self, h: usize, s: usize, a: usize) -> &[T] {
        let start = ((h * self.states + s) * self.actions + a) * self.states;
        &self.transitions[start..start + self.states]
    }

    pub fn sample_reward(&self, h: usize, s: usize, a: usize, rng: &mut Stream) -> T {
        RewardLaw::Bernoulli.sample(self.reward(h, s, a), rng)
    }

    pub fn sample_next(&self, h: usize, s: usize, a: usize, rng: &mut Stream) -> usize {
        sample_categorical(self.transition(h, s, a), rng)
    }
}

/// Converts weights that already sum to one into the scalar type, pushing
/// rounding residue into the largest entry so rows sum to one to within an ulp.
fn normalized<T: Scalar>(weights: impl Iterator<Item = f64>) -> Vec<T> {
    let mut row: Vec<T> = weights.map(T::lit).collect();
    let residue = T::one() - row.iter().copied().sum::<T>();
    if let Some(i) = crate::scalar::argmax(row.iter().copied()) {
        row[i] += residue;
    }
    row
}

/// Inverse-CDF draw from a probability vector; one uniform per call.
pub fn sample_categorical<T: Scalar>(probs: &[T], rng: &mut Stream) -> usize {
    let u = T::lit(rng.random::<f64>());
    let mut acc = T::zero();
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > T::zero()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_stream;
    use approx::assert_relative_eq;

    #[test]
    fn mab_gap_arithmetic() {
        let env = MabEnv::bernoulli(vec![0.9, 0.5]).unwrap();
        assert_relative_eq!(env.regret(1), 0.4, epsilon = 1e-15);
        assert_eq!(env.regret(0), 0.0);
    }

    #[test]
    fn mab_rejects_out_of_range_means() {
        assert!(MabEnv::bernoulli(vec![1.2, 0.5]).is_err());
        assert!(MabEnv::<f64>::bernoulli(vec![]).is_err());
    }

    #[test]
    fn evenly_spaced_means() {
        let env = MabEnv::<f64>::evenly_spaced(5, 0.4, 0.6).unwrap();
        let expected = [0.4, 0.45, 0.5, 0.55, 0.6];
        for (m, e) in env.means().iter().zip(expected) {
            assert_relative_eq!(*m, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn linear_inner_product_gap() {
        let actions = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let env = LinBanditEnv::new(
            vec![1.0, 0.0],
            LinearNoise::Gaussian { sd: 0.1 },
            ActionSets::Fixed { actions: actions.clone() },
        )
        .unwrap();
        assert_eq!(env.regret(&actions, 1), 1.0);
        assert_eq!(env.regret(&actions, 0), 0.0);
    }

    #[test]
    fn linear_rejects_means_outside_unit_ball() {
        let bad = LinBanditEnv::new(
            vec![2.0, 0.0],
            LinearNoise::Gaussian { sd: 0.1 },
            ActionSets::Fixed { actions: vec![vec![1.0, 0.0]] },
        );
        assert!(bad.is_err());
    }

    #[test]
    fn one_hot_action_sets() {
        let env = LinBanditEnv::new(
            vec![0.5, 0.5, 0.0, 1.0],
            LinearNoise::Bernoulli,
            ActionSets::OneHot { contexts: 2, arms: 2 },
        )
        .unwrap();
        let mut rng = rng_stream(1, 0, "adv");
        let set = env.action_set(1, &mut rng);
        assert_eq!(set, vec![vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]]);
        assert_eq!(env.regret(&set, 0), 1.0);
    }

    #[test]
    fn random_sphere_respects_radius() {
        let env = LinBanditEnv::new(
            vec![0.6, 0.0, 0.0],
            LinearNoise::Gaussian { sd: 1.0 },
            ActionSets::RandomSphere { count: 8, radius: 1.0 },
        )
        .unwrap();
        let mut rng = rng_stream(2, 0, "adv");
        for x in env.action_set(0, &mut rng) {
            assert_relative_eq!(norm(&x), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn reward_support_is_exact() {
        let p = vec![vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]; 2]; 2];
        let r = vec![vec![vec![0.0, 0.3], vec![0.0, 0.0]], vec![vec![0.0, 0.0], vec![1.0, 0.0]]];
        let mdp = TabularMdp::new(p, r, vec![1.0, 0.0]).unwrap();
        assert_eq!(mdp.reward_support(), &[(0, 1, 0), (1, 0, 1)]);
    }

    #[test]
    fn mdp_rejects_bad_rows() {
        let p = vec![vec![vec![vec![0.6, 0.6]]]];
        assert!(TabularMdp::new(p, vec![vec![vec![0.0]]], vec![1.0]).is_err());
    }

    #[test]
    fn random_mdp_rows_sum_to_one() {
        let mut rng = rng_stream(3, 0, "instance");
        let mdp = TabularMdp::<f64>::random(4, 2, 4, 0.5, 1.0, &mut rng).unwrap();
        for h in 0..4 {
            for s in 0..4 {
                for a in 0..2 {
                    let total: f64 = mdp.transition(h, s, a).iter().sum();
                    assert!((total - 1.0).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn categorical_draw_frequencies() {
        let mut rng = rng_stream(4, 0, "env");
        let probs = [0.2f64, 0.0, 0.8];
        let mut counts = [0usize; 3];
        for _ in 0..20_000 {
            counts[sample_categorical(&probs, &mut rng)] += 1;
        }
        assert_eq!(counts[1], 0);
        assert!((counts[0] as f64 / 20_000.0 - 0.2).abs() < 0.02);
    }
}
