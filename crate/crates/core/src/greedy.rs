//! Greedy reduction: spend budget as soon as it arrives, and on rounds
//! without budget replay a uniformly drawn earlier policy of the base learner.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::budget::QueryLedger;
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::scalar::{argmax, count_or_one, Scalar};

/// An anytime learner for contextual bandits. It advances only when it is fed
/// a reward, and its decision depends only on its own statistics and the
/// context.
pub trait AnytimeLearner<T>: Clone {
    fn act(&self, context: usize) -> usize;
    fn update(&mut self, context: usize, action: usize, reward: T) -> Result<()>;
    /// Number of updates absorbed so far.
    fn iterations(&self) -> usize;
}

/// UCB with per-context arm statistics and bonus
/// `√(3·ln(A·l) / (2·(n(u,a) ∨ 1)))`, where `l` is the index of the iteration
/// being played (one more than the updates absorbed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnytimeUcb<T> {
    arms: usize,
    counts: Vec<usize>,
    means: Vec<T>,
    iterations: usize,
}

impl<T: Scalar> AnytimeUcb<T> {
    pub fn new(contexts: usize, arms: usize) -> Result<Self> {
        if contexts == 0 || arms < 2 {
            return Err(Error::InvalidParameter("anytime UCB needs a context and at least two arms".into()));
        }
        Ok(Self { arms, counts: vec![0; contexts * arms], means: vec![T::zero(); contexts * arms], iterations: 0 })
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn contexts(&self) -> usize {
        self.counts.len() / self.arms
    }

    pub fn count(&self, context: usize, arm: usize) -> usize {
        self.counts[context * self.arms + arm]
    }

    pub fn mean(&self, context: usize, arm: usize) -> T {
        self.means[context * self.arms + arm]
    }

    pub fn ucb(&self, context: usize, arm: usize) -> T {
        let l = T::count(self.arms * (self.iterations + 1));
        let n = count_or_one::<T>(self.count(context, arm));
        self.mean(context, arm) + (T::lit(3.0) * l.ln() / (T::lit(2.0) * n)).sqrt()
    }
}

impl<T: Scalar> AnytimeLearner<T> for AnytimeUcb<T> {
    fn act(&self, context: usize) -> usize {
        argmax((0..self.arms).map(|a| self.ucb(context, a))).unwrap_or(0)
    }

    fn update(&mut self, context: usize, action: usize, reward: T) -> Result<()> {
        if !(reward >= T::zero() && reward <= T::one()) {
            return Err(Error::RewardOutOfRange { reward: reward.as_f64() });
        }
        let i = context * self.arms + action;
        self.counts[i] += 1;
        let delta = (reward - self.means[i]) / T::count(self.counts[i]);
        self.means[i] += delta;
        self.iterations += 1;
        Ok(())
    }

    fn iterations(&self) -> usize {
        self.iterations
    }
}

/// Outcome of one greedy round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyStep {
    pub action: usize,
    pub queried: bool,
    /// 1-based index `j` of the snapshot that chose the action.
    pub snapshot: usize,
}

/// Greedy reduction around an anytime learner.
///
/// Snapshot `j` is the learner as it stood at its `j`-th queried round, i.e.
/// after `j − 1` updates. Snapshots are stored by value.
#[derive(Debug, Clone)]
pub struct GreedyReduction<L> {
    base: L,
    snapshots: Vec<L>,
    pending: Option<(usize, usize)>,
    round: usize,
}

impl<L> GreedyReduction<L> {
    pub fn new(base: L) -> Self {
        Self { base, snapshots: Vec::new(), pending: None, round: 0 }
    }

    pub fn base(&self) -> &L {
        &self.base
    }

    pub fn snapshots(&self) -> &[L] {
        &self.snapshots
    }

    /// Current iteration count `l`.
    pub fn iteration(&self) -> usize {
        self.snapshots.len()
    }
}

impl<L> GreedyReduction<L> {
    /// Plays one round. If `B(t) ≥ B^q(t−1) + c(a)` for the action `a` of the
    /// current learner, that action is played and queried; the reward must
    /// then be passed to [`GreedyReduction::observe`]. Otherwise a snapshot is
    /// replayed and nothing is learned.
    pub fn greedy_step<T: Scalar>(
        &mut self,
        context: usize,
        budget: T,
        ledger: &mut QueryLedger<T>,
        rng: &mut Stream,
    ) -> Result<GreedyStep>
    where
        L: AnytimeLearner<T>,
    {
        self.round += 1;
        self.pending = None;
        let action = self.base.act(context);
        if ledger.can_afford(action, budget) {
            ledger.charge(action, budget, self.round)?;
            self.snapshots.push(self.base.clone());
            self.pending = Some((context, action));
            return Ok(GreedyStep { action, queried: true, snapshot: self.snapshots.len() });
        }
        let l = self.snapshots.len();
        if l == 0 {
            return Err(Error::NoSnapshot { round: self.round });
        }
        let j = if l == 1 { 1 } else { rng.random_range(1..=l) };
        let action = self.snapshots[j - 1].act(context);
        Ok(GreedyStep { action, queried: false, snapshot: j })
    }

    /// Feeds the reward of the round just queried to the base learner.
    /// Ignored after an unqueried round.
    pub fn observe<T: Scalar>(&mut self, reward: T) -> Result<()>
    where
        L: AnytimeLearner<T>,
    {
        match self.pending.take() {
            Some((context, action)) => self.base.update(context, action, reward),
            None => Ok(()),
        }
    }
}
