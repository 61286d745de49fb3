//! Adaptive adversaries that defeat the greedy reduction.
//!
//! Two contexts, two arms. In context 0 both arms pay the same; in context 1
//! the second arm pays 1 and the first pays 0. The budget grows by one unit
//! exactly on rounds whose context is 0, so a learner that spends budget as
//! soon as it arrives never observes a reward in context 1.
//!
//! * [`AdversaryMode::BudgetAdversary`]: contexts are i.i.d. uniform and the
//!   budget adversary watches them.
//! * [`AdversaryMode::ContextAdversary`]: the budget grows with probability ½ and
//!   the context adversary reveals context 0 exactly when it did.
//!
//! Either way `E[B(t)] ≈ t/2`. Round 1 always carries context 0 and the first
//! unit of budget.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::budget::{AdaptiveBudget, BudgetSchedule};
use crate::context::ContextLaw;
use crate::env::{CmabEnv, RewardLaw};
use crate::error::Result;
use crate::rng::Stream;
use crate::scalar::Scalar;
use crate::trace::RunTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryMode {
    BudgetAdversary,
    ContextAdversary,
}

/// Context whose rounds carry a budget increment.
pub const FUNDED_CONTEXT: usize = 0;

/// Context revealed by the context adversary after its increment draw.
pub fn context_for_increment(increment: bool) -> usize {
    if increment { FUNDED_CONTEXT } else { 1 - FUNDED_CONTEXT }
}

#[derive(Debug, Clone, Copy)]
pub struct FundedContexts {
    pub mode: AdversaryMode,
}

impl<T> ContextLaw<T> for FundedContexts {
    fn next_context(&mut self, t: usize, _: &RunTrace<T>, rng: &mut Stream) -> usize {
        if t == 1 {
            return FUNDED_CONTEXT;
        }
        match self.mode {
            AdversaryMode::BudgetAdversary => rng.random_range(0..2),
            AdversaryMode::ContextAdversary => context_for_increment(rng.random_bool(0.5)),
        }
    }
}

/// `B(t) = B(t−1) + 1{u_t = FUNDED_CONTEXT}`, reading `B(t−1)` from the history.
#[derive(Debug, Clone, Copy, Default)]
pub struct IncrementOnFundedContext;

impl<T: Scalar> AdaptiveBudget<T> for IncrementOnFundedContext {
    fn budget(&mut self, _: usize, history: &RunTrace<T>, context: usize, _: &mut Stream) -> T {
        let previous = history.last().map_or(T::zero(), |row| row.budget);
        if context == FUNDED_CONTEXT { previous + T::one() } else { previous }
    }
}

/// The two-context, two-arm instance.
pub fn funded_context_env<T: Scalar>() -> Result<CmabEnv<T>> {
    let half = T::lit(0.5);
    CmabEnv::new(vec![vec![half, half], vec![T::zero(), T::one()]], RewardLaw::Bernoulli)
}

/// Budget schedule and context law for the chosen mode.
pub fn make_funded_context_adversary<T: Scalar>(mode: AdversaryMode) -> (BudgetSchedule<T>, FundedContexts) {
    (BudgetSchedule::adaptive(IncrementOnFundedContext), FundedContexts { mode })
}
