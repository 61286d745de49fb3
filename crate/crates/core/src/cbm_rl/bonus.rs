//! Exploration bonuses and the reward-query rule of the tabular learners.

use serde::{Deserialize, Serialize};

use crate::scalar::{count_or_one, Scalar};

/// Which optimistic base learner is wrapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RlVariant {
    /// Hoeffding transition bonus, truncated value iteration.
    Ucbvi,
    /// Variance-aware transition bonus, optimistic-pessimistic value iteration.
    Ulcvi,
}

impl RlVariant {
    fn log_constant(self) -> f64 {
        match self {
            Self::Ucbvi => 12.0,
            Self::Ulcvi => 16.0,
        }
    }
}

/// `L_{t,δ} = ln(c·S²·A·H·t²·(t+1)/δ)` with `c = 12` (UCBVI) or `16` (ULCVI).
pub fn log_term<T: Scalar>(variant: RlVariant, states: usize, actions: usize, horizon: usize, t: usize, delta: T) -> T {
    let s = T::count(states);
    let tt = T::count(t);
    let inner = T::lit(variant.log_constant())
        * s
        * s
        * T::count(actions)
        * T::count(horizon)
        * tt
        * tt
        * (tt + T::one())
        / delta;
    inner.ln()
}

/// `b^r = √(2·Var̂·L/(n^q∨1)) + 5·L/(n^q∨1)`.
pub fn rl_reward_bonus<T: Scalar>(variance: T, queries: usize, log_term: T) -> T {
    let n = count_or_one::<T>(queries);
    (T::lit(2.0) * variance * log_term / n).sqrt() + T::lit(5.0) * log_term / n
}

/// `b^p = √(2H²L/(n∨1)) + 5HL/(n∨1)`.
pub fn ucbvi_transition_bonus<T: Scalar>(visits: usize, horizon: usize, log_term: T) -> T {
    let n = count_or_one::<T>(visits);
    let h = T::count(horizon);
    (T::lit(2.0) * h * h * log_term / n).sqrt() + T::lit(5.0) * h * log_term / n
}

/// `Var_P(v) = Σ P·v² − (Σ P·v)²`, clamped at zero against rounding.
pub fn variance_under<T: Scalar>(probs: &[T], values: &[T]) -> T {
    let mean: T = probs.iter().zip(values).map(|(&p, &v)| p * v).sum();
    let second: T = probs.iter().zip(values).map(|(&p, &v)| p * v * v).sum();
    (second - mean * mean).max(T::zero())
}

/// `b^p = √(2·Var_P̄(V̄)·L/(n∨1)) + 44·H²·S·L/(n∨1) + E_P̄[V̄ − V̲]/(16H)`.
pub fn ulcvi_transition_bonus<T: Scalar>(
    visits: usize,
    probs: &[T],
    upper_next: &[T],
    lower_next: &[T],
    horizon: usize,
    log_term: T,
) -> T {
    let n = count_or_one::<T>(visits);
    let h = T::count(horizon);
    let s = T::count(probs.len());
    let var = variance_under(probs, upper_next);
    let gap: T = probs
        .iter()
        .zip(upper_next.iter().zip(lower_next))
        .map(|(&p, (&u, &l))| p * (u - l))
        .sum();
    (T::lit(2.0) * var * log_term / n).sqrt()
        + T::lit(44.0) * h * h * s * log_term / n
        + gap / (T::lit(16.0) * h)
}

/// Query threshold `L·(6·√(|L_R|/B) + 4·S·A·H·(ln(1+B) + 1)/B)`, or `None`
/// when `B < 1` (no query possible).
pub fn rl_query_threshold<T: Scalar>(
    log_term: T,
    support_size: usize,
    budget: T,
    states: usize,
    actions: usize,
    horizon: usize,
) -> Option<T> {
    if !(budget >= T::one()) {
        return None;
    }
    let sah = T::count(states * actions * horizon);
    let sparse = T::lit(6.0) * (T::count(support_size) / budget).sqrt();
    let dense = T::lit(4.0) * sah * ((T::one() + budget).ln() + T::one()) / budget;
    Some(log_term * (sparse + dense))
}

/// `CI^R ≥ threshold`; never true when `B(t) < 1`.
pub fn rl_should_query<T: Scalar>(
    reward_ci: T,
    support_size: usize,
    budget: T,
    states: usize,
    actions: usize,
    horizon: usize,
    log_term: T,
) -> bool {
    rl_query_threshold(log_term, support_size, budget, states, actions, horizon)
        .is_some_and(|threshold| reward_ci >= threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_term_example() {
        let l = log_term::<f64>(RlVariant::Ucbvi, 2, 2, 2, 1, 0.1);
        assert_relative_eq!(l, 3840f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(l, 8.253, epsilon = 1e-3);
        let l16 = log_term::<f64>(RlVariant::Ulcvi, 2, 2, 2, 1, 0.1);
        assert_relative_eq!(l16, 5120f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn reward_bonus_examples() {
        let l = 3840f64.ln();
        assert_relative_eq!(rl_reward_bonus(0.0, 0, l), 5.0 * l, epsilon = 1e-12);
        assert_relative_eq!(rl_reward_bonus(0.0, 0, l), 41.27, epsilon = 1e-2);
        assert_relative_eq!(
            rl_reward_bonus(0.25, 16, l),
            (2.0 * 0.25 * l / 16.0).sqrt() + 5.0 * l / 16.0,
            epsilon = 1e-12
        );
        assert!(rl_reward_bonus(0.25, 1 << 40, l) < 1e-4);
    }

    #[test]
    fn ucbvi_transition_examples() {
        let l = 3840f64.ln();
        let b = ucbvi_transition_bonus(100, 2, l);
        assert_relative_eq!(b, (8.0 * l / 100.0).sqrt() + 10.0 * l / 100.0, epsilon = 1e-12);
        assert_relative_eq!(b, 1.638, epsilon = 1e-3);
        assert_relative_eq!(ucbvi_transition_bonus(0, 2, l), (8.0 * l).sqrt() + 10.0 * l, epsilon = 1e-12);
        // the square-root term halves when the count quadruples
        let first = |n: usize| ucbvi_transition_bonus(n, 3, 1.0) - 15.0 / n as f64;
        assert_relative_eq!(first(25), 2.0 * first(100), epsilon = 1e-12);
    }

    #[test]
    fn ulcvi_transition_examples() {
        let b = ulcvi_transition_bonus(1, &[0.5, 0.5], &[0.0, 2.0], &[0.0, 0.0], 2, 1.0);
        assert_relative_eq!(b, 2f64.sqrt() + 352.0 + 1.0 / 32.0, epsilon = 1e-12);
        assert_relative_eq!(b, 353.45, epsilon = 1e-2);
        let zero = ulcvi_transition_bonus(4, &[0.5, 0.5], &[0.0, 0.0], &[0.0, 0.0], 2, 1.0);
        assert_relative_eq!(zero, 44.0 * 4.0 * 2.0 / 4.0, epsilon = 1e-12);
        assert_eq!(variance_under(&[0.0, 1.0, 0.0], &[5.0, 3.0, 1.0]), 0.0);
    }

    #[test]
    fn query_rule_example() {
        let l = 3840f64.ln();
        let ci = 2.0 * rl_reward_bonus(0.0, 0, l);
        let threshold = rl_query_threshold(l, 1, 100.0, 2, 2, 2).unwrap();
        let expected = l * (6.0 * 0.1 + 32.0 * (101f64.ln() + 1.0) / 100.0);
        assert_relative_eq!(threshold, expected, epsilon = 1e-12);
        assert_relative_eq!(ci, 82.53, epsilon = 1e-2);
        assert_relative_eq!(threshold, 19.78, epsilon = 1e-2);
        assert!(rl_should_query(ci, 1, 100.0, 2, 2, 2, l));
        assert!(!rl_should_query(ci, 1, 0.0, 2, 2, 2, l));
    }

    #[test]
    fn threshold_decreases_in_budget() {
        let l = 5.0;
        let mut last = f64::INFINITY;
        for b in 1..2000 {
            let th = rl_query_threshold(l, 3, b as f64, 4, 2, 4).unwrap();
            assert!(th < last);
            last = th;
        }
    }
}
