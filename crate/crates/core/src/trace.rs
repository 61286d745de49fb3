//! Per-round records of a simulated run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One round (bandits) or one episode (RL).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow<T> {
    /// 1-based round index.
    pub t: usize,
    /// Context revealed at the start of the round (initial state in RL).
    pub context: usize,
    /// Action played (first action of the episode in RL).
    pub action: usize,
    /// Number of reward queries issued this round; 0 or 1 for bandits.
    pub queries: u32,
    /// Observed reward, if queried (bandits only).
    pub reward: Option<T>,
    pub budget: T,
    pub budget_used: T,
    pub regret_inst: T,
    pub regret_cum: T,
}

/// Ordered trace of a run. Doubles as the observable filtration handed to
/// adaptive adversaries: it contains only what the learner itself observed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace<T> {
    rows: Vec<TraceRow<T>>,
}

impl<T: Scalar> RunTrace<T> {
    pub fn new() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn with_capacity(n: usize) -> Self {
        Self { rows: Vec::with_capacity(n) }
    }

    pub fn rows(&self) -> &[TraceRow<T>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow<T>> {
        self.rows.last()
    }

    /// Cumulative pseudo-regret so far.
    pub fn regret(&self) -> T {
        self.rows.last().map_or(T::zero(), |r| r.regret_cum)
    }

    /// Cumulative query cost so far.
    pub fn budget_used(&self) -> T {
        self.rows.last().map_or(T::zero(), |r| r.budget_used)
    }

    pub fn total_queries(&self) -> u64 {
        self.rows.iter().map(|r| u64::from(r.queries)).sum()
    }

    /// Appends a row, filling in the cumulative regret and checking that the
    /// query budget was respected.
    pub fn push(
        &mut self,
        context: usize,
        action: usize,
        queries: u32,
        reward: Option<T>,
        budget: T,
        budget_used: T,
        regret_inst: T,
    ) -> Result<()> {
        let t = self.rows.len() + 1;
        if budget_used > budget {
            return Err(Error::BudgetViolation {
                round: t,
                used: budget_used.as_f64(),
                available: budget.as_f64(),
            });
        }
        let regret_cum = self.regret() + regret_inst;
        self.rows.push(TraceRow {
            t,
            context,
            action,
            queries,
            reward,
            budget,
            budget_used,
            regret_inst,
            regret_cum,
        });
        Ok(())
    }

    /// Re-checks the structural invariants of a finished trace.
    pub fn validate(&self) -> Result<()> {
        let mut cum = T::zero();
        let mut last_budget = T::zero();
        for (i, row) in self.rows.iter().enumerate() {
            if row.t != i + 1 {
                return Err(Error::InvalidParameter(format!("row {i} has round index {}", row.t)));
            }
            if row.budget_used > row.budget {
                return Err(Error::BudgetViolation {
                    round: row.t,
                    used: row.budget_used.as_f64(),
                    available: row.budget.as_f64(),
                });
            }
            if row.budget < last_budget {
                return Err(Error::NonMonotoneBudget {
                    round: row.t,
                    previous: last_budget.as_f64(),
                    next: row.budget.as_f64(),
                });
            }
            last_budget = row.budget;
            cum += row.regret_inst;
            if cum != row.regret_cum {
                return Err(Error::InvalidParameter(format!(
                    "cumulative regret at round {} is not the prefix sum",
                    row.t
                )));
            }
        }
        Ok(())
    }
}
