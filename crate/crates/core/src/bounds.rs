//! Closed-form minimax lower bounds and budget-profile regret predictions.
//!
//! These are reference curves for plots and sanity checks. Lower bounds are
//! worst-case over instances, so a single simulated instance may sit below them.
//! All logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::budget::BudgetProfile;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A labelled series of `(t, value)` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve<T> {
    pub label: String,
    pub points: Vec<(usize, T)>,
}

impl<T: Scalar> BoundCurve<T> {
    pub fn from_fn(label: impl Into<String>, ts: impl IntoIterator<Item = usize>, f: impl Fn(usize) -> T) -> Self {
        Self { label: label.into(), points: ts.into_iter().map(|t| (t, f(t))).collect() }
    }

    pub fn last_value(&self) -> Option<T> {
        self.points.last().map(|&(_, v)| v)
    }
}

fn c140<T: Scalar>() -> T {
    T::lit(140.0)
}

/// `min{√ratio, 1}` with `ratio = +∞` when the denominator vanishes.
fn capped_root<T: Scalar>(num: T, den: T) -> T {
    if num <= T::zero() {
        T::zero()
    } else if den <= T::zero() {
        T::one()
    } else {
        (num / den).sqrt().min(T::one())
    }
}

/// Unit costs, fixed budget: `(1/140)·min{T√(A/B), T}`.
pub fn mab_lb_unit<T: Scalar>(horizon: usize, arms: usize, budget: T) -> T {
    T::count(horizon) * capped_root(T::count(arms), budget) / c140()
}

/// Arm-dependent costs: `(1/140)·min{T√(Σc/(B(1+ln A))), T}`.
pub fn mab_lb_costs<T: Scalar>(horizon: usize, costs: &[T], budget: T) -> T {
    let total: T = costs.iter().copied().sum();
    let log_factor = T::one() + T::count(costs.len()).ln();
    T::count(horizon) * capped_root(total, budget * log_factor) / c140()
}

/// Non-decreasing budget sequence `B(1..T)`:
/// `(1/(140(1+ln T)))·Σ_t min{√(Σc/(B(t)(1+ln A))), 1}`.
pub fn mab_lb_varying<T: Scalar>(schedule: &[T], costs: &[T]) -> T {
    let horizon = schedule.len();
    if horizon == 0 {
        return T::zero();
    }
    let total: T = costs.iter().copied().sum();
    let log_a = T::one() + T::count(costs.len()).ln();
    let sum: T = schedule.iter().map(|&b| capped_root(total, b * log_a)).sum();
    sum / (c140::<T>() * (T::one() + T::count(horizon).ln()))
}

/// Linear bandits on `[−1,1]^d` with fixed budget `1 ≤ B ≤ T`: `dT/(80√B)`.
pub fn lin_lb<T: Scalar>(horizon: usize, dim: usize, budget: T) -> Result<T> {
    if !(budget >= T::one()) || budget > T::count(horizon) {
        return Err(Error::InvalidParameter(format!(
            "linear lower bound needs 1 ≤ B ≤ T, got B = {budget}, T = {horizon}"
        )));
    }
    Ok(T::count(dim) * T::count(horizon) / (T::lit(80.0) * budget.sqrt()))
}

/// Predicted regret order at horizon `t` under a budget profile:
/// linear `2√(At/ε)`, polynomial `√A·t^{1−c/2}`, fixed `√A·t/√B0`,
/// periodic `√(AtN/B0)`.
pub fn predicted_regret<T: Scalar>(profile: &BudgetProfile<T>, arms: usize, t: usize) -> Result<T> {
    let a = T::count(arms);
    let tt = T::count(t);
    let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
    match *profile {
        BudgetProfile::Linear { epsilon } if epsilon > T::zero() => {
            Ok(T::lit(2.0) * (a * tt / epsilon).sqrt())
        }
        BudgetProfile::Polynomial { exponent } if exponent > T::zero() && exponent <= T::one() => {
            Ok(a.sqrt() * tt.powf(T::one() - exponent / T::lit(2.0)))
        }
        BudgetProfile::Fixed { value } if value > T::zero() => Ok(a.sqrt() * tt / value.sqrt()),
        BudgetProfile::Periodic { initial, period } if initial > T::zero() && period >= 1 => {
            Ok((a * tt * T::count(period) / initial).sqrt())
        }
        BudgetProfile::Step { .. } => bad("no closed-form prediction for step budgets"),
        _ => bad("profile parameters out of range for a regret prediction"),
    }
}

/// Prediction curve over `t = 1..=horizon`.
pub fn predicted_profile<T: Scalar>(
    profile: &BudgetProfile<T>,
    arms: usize,
    horizon: usize,
) -> Result<BoundCurve<T>> {
    let points = (1..=horizon)
        .map(|t| predicted_regret(profile, arms, t).map(|v| (t, v)))
        .collect::<Result<Vec<_>>>()?;
    let label = match profile {
        BudgetProfile::Linear { .. } => "predicted-linear",
        BudgetProfile::Polynomial { .. } => "predicted-polynomial",
        BudgetProfile::Fixed { .. } => "predicted-fixed",
        BudgetProfile::Periodic { .. } => "predicted-periodic",
        BudgetProfile::Step { .. } => "predicted-step",
    };
    Ok(BoundCurve { label: label.into(), points })
}
