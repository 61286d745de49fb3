//! Budget streams and query accounting.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::scalar::Scalar;
use crate::trace::RunTrace;

/// Closed-form budget profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BudgetProfile<T> {
    /// `B(t) = ε·t`.
    Linear { epsilon: T },
    /// `B(t) = t^c`.
    Polynomial { exponent: T },
    /// `B(t) = B0`.
    Fixed { value: T },
    /// `B(t) = B0·(1 + ⌊t/N⌋)`.
    Periodic { initial: T, period: usize },
    /// `B(t) = ⌈t/N⌉·increment`.
    Step { increment: T, every: usize },
}

impl<T: Scalar> BudgetProfile<T> {
    pub fn value(&self, t: usize) -> T {
        let tt = T::count(t);
        match *self {
            Self::Linear { epsilon } => epsilon * tt,
            Self::Polynomial { exponent } => tt.powf(exponent),
            Self::Fixed { value } => value,
            Self::Periodic { initial, period } => initial * T::count(1 + t / period.max(1)),
            Self::Step { increment, every } => increment * T::count(t.div_ceil(every.max(1))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        match *self {
            Self::Linear { epsilon } if !(epsilon >= T::zero()) => bad("linear budget needs ε ≥ 0"),
            Self::Polynomial { exponent } if !(exponent >= T::zero()) => {
                bad("polynomial budget needs c ≥ 0")
            }
            Self::Fixed { value } if !(value >= T::zero()) || !value.is_finite() => {
                bad("fixed budget must be finite and non-negative")
            }
            Self::Periodic { initial, period } if !(initial >= T::zero()) || period == 0 => {
                bad("periodic budget needs B0 ≥ 0 and N ≥ 1")
            }
            Self::Step { increment, every } if !(increment >= T::zero()) || every == 0 => {
                bad("step budget needs increment ≥ 0 and every ≥ 1")
            }
            _ => Ok(()),
        }
    }
}

/// A budget that reacts to the observed history.
///
/// `history` holds rounds `1..t`; `context` is the context revealed at round
/// `t`, which is part of the filtration the adversary may condition on.
pub trait AdaptiveBudget<T>: Send {
    fn budget(&mut self, t: usize, history: &RunTrace<T>, context: usize, rng: &mut Stream) -> T;
}

pub enum ScheduleKind<T> {
    /// Oblivious sequence; the last value repeats past its end.
    Sequence(Vec<T>),
    Profile(BudgetProfile<T>),
    Adaptive(Box<dyn AdaptiveBudget<T>>),
}

impl<T: fmt::Debug> fmt::Debug for ScheduleKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sequence(v) => f.debug_tuple("Sequence").field(&v.len()).finish(),
            Self::Profile(p) => f.debug_tuple("Profile").field(p).finish(),
            Self::Adaptive(_) => f.write_str("Adaptive(..)"),
        }
    }
}

/// Non-decreasing budget stream `B(t)`.
#[derive(Debug)]
pub struct BudgetSchedule<T> {
    kind: ScheduleKind<T>,
    last_value: T,
    last_round: usize,
}

impl<T: Scalar> BudgetSchedule<T> {
    pub fn new(kind: ScheduleKind<T>) -> Self {
        Self { kind, last_value: T::zero(), last_round: 0 }
    }

    pub fn profile(profile: BudgetProfile<T>) -> Self {
        Self::new(ScheduleKind::Profile(profile))
    }

    pub fn sequence(values: Vec<T>) -> Self {
        Self::new(ScheduleKind::Sequence(values))
    }

    pub fn adaptive(callback: impl AdaptiveBudget<T> + 'static) -> Self {
        Self::new(ScheduleKind::Adaptive(Box::new(callback)))
    }

    pub fn fixed(value: T) -> Self {
        Self::profile(BudgetProfile::Fixed { value })
    }

    pub fn last_value(&self) -> T {
        self.last_value
    }

    /// Emits `B(t)`. Rounds must be requested in order starting at 1.
    pub fn advance_budget(
        &mut self,
        t: usize,
        history: &RunTrace<T>,
        context: usize,
        rng: &mut Stream,
    ) -> Result<T> {
        if t == 0 || t != self.last_round + 1 {
            return Err(Error::InvalidParameter(format!(
                "budget requested for round {t} after round {}",
                self.last_round
            )));
        }
        let value = match &mut self.kind {
            ScheduleKind::Sequence(values) => match values.get(t - 1).or(values.last()) {
                Some(&v) => v,
                None => T::zero(),
            },
            ScheduleKind::Profile(p) => p.value(t),
            ScheduleKind::Adaptive(cb) => cb.budget(t, history, context, rng),
        };
        if !value.is_finite() || value < T::zero() {
            return Err(Error::InvalidBudget { round: t, value: value.as_f64() });
        }
        if value < self.last_value {
            return Err(Error::NonMonotoneBudget {
                round: t,
                previous: self.last_value.as_f64(),
                next: value.as_f64(),
            });
        }
        self.last_value = value;
        self.last_round = t;
        Ok(value)
    }
}

/// Running query cost `B^q(t)` and count `n^q_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryLedger<T> {
    costs: Vec<T>,
    used: T,
    queries: usize,
}

impl<T: Scalar> QueryLedger<T> {
    /// Every query costs one unit.
    pub fn unit() -> Self {
        Self { costs: Vec::new(), used: T::zero(), queries: 0 }
    }

    pub fn with_costs(costs: Vec<T>) -> Result<Self> {
        if costs.iter().any(|c| !(*c >= T::zero()) || !c.is_finite()) {
            return Err(Error::InvalidParameter("query costs must be finite and non-negative".into()));
        }
        Ok(Self { costs, used: T::zero(), queries: 0 })
    }

    pub fn cost(&self, action: usize) -> T {
        self.costs.get(action).copied().unwrap_or_else(T::one)
    }

    /// `Σ_a c(a)`; equals the action count under unit costs.
    pub fn total_cost(&self, actions: usize) -> T {
        if self.costs.is_empty() {
            T::count(actions)
        } else {
            self.costs.iter().copied().sum()
        }
    }

    pub fn used(&self) -> T {
        self.used
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    /// `B^q(t−1) + c(action) ≤ B(t)`.
    pub fn can_afford(&self, action: usize, budget: T) -> bool {
        self.used + self.cost(action) <= budget
    }

    /// Records a query. Fails if it would overspend.
    pub fn charge(&mut self, action: usize, budget: T, round: usize) -> Result<()> {
        let next = self.used + self.cost(action);
        if next > budget {
            return Err(Error::BudgetViolation {
                round,
                used: next.as_f64(),
                available: budget.as_f64(),
            });
        }
        self.used = next;
        self.queries += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_stream;

    struct Emit(Vec<f64>);

    impl AdaptiveBudget<f64> for Emit {
        fn budget(&mut self, t: usize, _: &RunTrace<f64>, _: usize, _: &mut Stream) -> f64 {
            self.0[t - 1]
        }
    }

    fn run(schedule: &mut BudgetSchedule<f64>, rounds: usize) -> Result<Vec<f64>> {
        let history = RunTrace::new();
        let mut rng = rng_stream(0, 0, "adv");
        (1..=rounds).map(|t| schedule.advance_budget(t, &history, 0, &mut rng)).collect()
    }

    #[test]
    fn fixed_profile_is_constant() {
        let mut s = BudgetSchedule::fixed(7.0);
        assert_eq!(run(&mut s, 5).unwrap(), vec![7.0; 5]);
    }

    #[test]
    fn linear_profile_at_ten() {
        let p = BudgetProfile::Linear { epsilon: 0.5 };
        assert_eq!(p.value(10), 5.0);
    }

    #[test]
    fn periodic_and_step_profiles() {
        let p = BudgetProfile::Periodic { initial: 3.0, period: 10 };
        assert_eq!([p.value(1), p.value(9), p.value(10), p.value(25)], [3.0, 3.0, 6.0, 9.0]);
        let s = BudgetProfile::Step { increment: 4.0, every: 32 };
        assert_eq!([s.value(1), s.value(32), s.value(33)], [4.0, 4.0, 8.0]);
    }

    #[test]
    fn adaptive_decrease_is_rejected() {
        let mut s = BudgetSchedule::adaptive(Emit(vec![7.0, 5.0]));
        let err = run(&mut s, 2).unwrap_err();
        assert_eq!(err, Error::NonMonotoneBudget { round: 2, previous: 7.0, next: 5.0 });
    }

    #[test]
    fn sequence_repeats_last_value() {
        let mut s = BudgetSchedule::sequence(vec![1.0, 2.0]);
        assert_eq!(run(&mut s, 4).unwrap(), vec![1.0, 2.0, 2.0, 2.0]);
        assert_eq!(s.last_value(), 2.0);
    }

    #[test]
    fn negative_budget_is_rejected() {
        let mut s = BudgetSchedule::sequence(vec![-1.0]);
        assert!(matches!(run(&mut s, 1), Err(Error::InvalidBudget { .. })));
    }

    #[test]
    fn ledger_charges_action_costs() {
        let mut ledger = QueryLedger::with_costs(vec![2.0, 0.5]).unwrap();
        assert_eq!(ledger.total_cost(2), 2.5);
        assert!(ledger.can_afford(0, 2.0));
        ledger.charge(0, 2.0, 1).unwrap();
        assert!(!ledger.can_afford(1, 2.0));
        assert!(ledger.charge(1, 2.0, 2).is_err());
        ledger.charge(1, 2.5, 2).unwrap();
        assert_eq!((ledger.used(), ledger.queries()), (2.5, 2));
    }

    #[test]
    fn unit_ledger_counts_queries() {
        let mut ledger = QueryLedger::<f64>::unit();
        ledger.charge(5, 1.0, 1).unwrap();
        assert_eq!(ledger.used(), ledger.queries() as f64);
        assert_eq!(ledger.total_cost(4), 4.0);
    }
}
