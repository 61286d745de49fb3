//! Visit counts, empirical transitions and queried-reward statistics.

use crate::scalar::Scalar;

/// Running count, mean and centred second moment of queried rewards.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RewardStats<T> {
    pub count: usize,
    pub mean: T,
    pub m2: T,
}

impl<T: Scalar> RewardStats<T> {
    pub fn push(&mut self, x: T) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / T::count(self.count);
        self.m2 += delta * (x - self.mean);
    }

    pub fn from_samples(samples: &[T]) -> Self {
        let mut stats = Self { count: 0, mean: T::zero(), m2: T::zero() };
        samples.iter().for_each(|&x| stats.push(x));
        stats
    }
}

/// Unbiased reward-variance estimate.
///
/// For `n ≥ 2` samples this is `Σ_{k,k'} (R_k − R_{k'})² / (2n(n−1))`, which
/// equals `Σ (R_k − R̄)² / (n − 1)`; fewer than two samples give 0.
pub fn empirical_reward_variance<T: Scalar>(stats: &RewardStats<T>) -> T {
    if stats.count < 2 {
        T::zero()
    } else {
        (stats.m2 / T::count(stats.count - 1)).max(T::zero())
    }
}

/// Sufficient statistics of the tabular learners, indexed by 0-based step `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct RlCounts<T> {
    states: usize,
    actions: usize,
    horizon: usize,
    /// `n_h(s,a)`, `[h][s][a]`.
    visits: Vec<usize>,
    /// Observed transitions, `[h][s][a][s']`.
    next: Vec<usize>,
    /// Queried rewards, `[h][s][a]`.
    rewards: Vec<RewardStats<T>>,
}

impl<T: Scalar> RlCounts<T> {
    pub fn new(states: usize, actions: usize, horizon: usize) -> Self {
        let sah = states * actions * horizon;
        Self {
            states,
            actions,
            horizon,
            visits: vec![0; sah],
            next: vec![0; sah * states],
            rewards: vec![RewardStats::default(); sah],
        }
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

    #[inline]
    fn idx(&self, h: usize, s: usize, a: usize) -> usize {
        (h * self.states + s) * self.actions + a
    }

    /// `n_h(s,a)`.
    pub fn visits(&self, h: usize, s: usize, a: usize) -> usize {
        self.visits[self.idx(h, s, a)]
    }

    /// `n^q_h(s,a)`.
    pub fn queries(&self, h: usize, s: usize, a: usize) -> usize {
        self.rewards[self.idx(h, s, a)].count
    }

    pub fn reward_stats(&self, h: usize, s: usize, a: usize) -> &RewardStats<T> {
        &self.rewards[self.idx(h, s, a)]
    }

    /// Empirical mean of the queried rewards, 0 when never queried.
    pub fn mean_reward(&self, h: usize, s: usize, a: usize) -> T {
        self.rewards[self.idx(h, s, a)].mean
    }

    pub fn reward_variance(&self, h: usize, s: usize, a: usize) -> T {
        empirical_reward_variance(self.reward_stats(h, s, a))
    }

    /// Empirical next-state law `P̄_h(·|s,a)`; uniform before the first visit.
    pub fn transition_row(&self, h: usize, s: usize, a: usize) -> Vec<T> {
        let n = self.visits(h, s, a);
        let start = self.idx(h, s, a) * self.states;
        let row = &self.next[start..start + self.states];
        let observed: usize = row.iter().sum();
        if n == 0 || observed == 0 {
            vec![T::one() / T::count(self.states); self.states]
        } else {
            let denom = T::count(observed);
            row.iter().map(|&c| T::count(c) / denom).collect()
        }
    }

    pub fn record_visit(&mut self, h: usize, s: usize, a: usize) {
        let i = self.idx(h, s, a);
        self.visits[i] += 1;
    }

    pub fn record_transition(&mut self, h: usize, s: usize, a: usize, next: usize) {
        let i = self.idx(h, s, a) * self.states + next;
        self.next[i] += 1;
    }

    pub fn record_reward(&mut self, h: usize, s: usize, a: usize, reward: T) {
        let i = self.idx(h, s, a);
        self.rewards[i].push(reward);
    }

    pub fn total_queries(&self) -> usize {
        self.rewards.iter().map(|r| r.count).sum()
    }

    /// Checks `n^q ≤ n` everywhere.
    pub fn queries_within_visits(&self) -> bool {
        self.rewards.iter().zip(&self.visits).all(|(r, &n)| r.count <= n)
    }
}
