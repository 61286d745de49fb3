//! CBM-UCB: UCB1-style indices with Hoeffding bonuses and a query rule that
//! matches the played arm's confidence width to the available budget.

use crate::error::{Error, Result};
use crate::scalar::{argmax, count_or_one, Scalar};

/// When to ask for the reward of the played action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryRule {
    /// Confidence-budget matching.
    #[default]
    Cbm,
    /// Query whenever the budget allows; the unbudgeted base algorithm.
    Always,
}

/// Per-arm query counts and empirical means of the queried rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct MabCbmState<T> {
    counts: Vec<usize>,
    means: Vec<T>,
    total_cost: T,
    round: usize,
}

impl<T: Scalar> MabCbmState<T> {
    /// `total_cost` is `Σ_a c(a)`. Single-armed problems are rejected.
    pub fn new(arms: usize, total_cost: T) -> Result<Self> {
        if arms < 2 {
            return Err(Error::InvalidParameter("CBM-UCB needs at least two arms".into()));
        }
        if !(total_cost >= T::zero()) {
            return Err(Error::InvalidParameter("total query cost must be non-negative".into()));
        }
        Ok(Self { counts: vec![0; arms], means: vec![T::zero(); arms], total_cost, round: 1 })
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    /// Current round `t` (1-based).
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn count(&self, arm: usize) -> usize {
        self.counts[arm]
    }

    pub fn mean(&self, arm: usize) -> T {
        self.means[arm]
    }

    pub fn total_queries(&self) -> usize {
        self.counts.iter().sum()
    }

    fn log_at(&self) -> T {
        (T::count(self.arms()) * T::count(self.round)).ln()
    }

    /// `b_t(a) = √(3·ln(A·t) / (2·(n^q_{t−1}(a) ∨ 1)))`.
    pub fn bonus(&self, arm: usize) -> T {
        (T::lit(3.0) * self.log_at() / (T::lit(2.0) * count_or_one::<T>(self.counts[arm]))).sqrt()
    }

    /// `CI_t(a) = 2·b_t(a)`.
    pub fn confidence_width(&self, arm: usize) -> T {
        T::lit(2.0) * self.bonus(arm)
    }

    pub fn ucb(&self, arm: usize) -> T {
        self.means[arm] + self.bonus(arm)
    }

    /// Arm with the largest upper confidence bound; ties go to the lowest index.
    pub fn select(&self) -> usize {
        argmax((0..self.arms()).map(|a| self.ucb(a))).unwrap_or(0)
    }

    /// `CI_t(a) ≥ 4·√(6·ln(A·t)·Σc / B(t))`.
    ///
    /// Squaring both sides and cancelling the common factor `6·ln(A·t) > 0`
    /// leaves `B(t) ≥ 16·Σc·(n^q_{t−1}(a) ∨ 1)`, which is evaluated instead so
    /// that exact ties are decided consistently. `B(t) = 0` never queries.
    pub fn should_query(&self, arm: usize, budget: T) -> bool {
        budget > T::zero() && budget >= T::lit(16.0) * self.total_cost * count_or_one::<T>(self.counts[arm])
    }

    /// Folds a queried reward into the running mean.
    pub fn update(&mut self, arm: usize, reward: T) -> Result<()> {
        if !(reward >= T::zero() && reward <= T::one()) {
            return Err(Error::RewardOutOfRange { reward: reward.as_f64() });
        }
        self.counts[arm] += 1;
        let n = T::count(self.counts[arm]);
        let delta = (reward - self.means[arm]) / n;
        self.means[arm] += delta;
        Ok(())
    }

    /// Moves to the next round; called once per round whether or not it queried.
    pub fn end_round(&mut self) {
        self.round += 1;
    }
}
