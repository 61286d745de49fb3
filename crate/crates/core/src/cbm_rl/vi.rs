//! Finite-horizon backward induction: truncated and optimistic-pessimistic.

use crate::env::TabularMdp;
use crate::scalar::{argmax, Scalar};

use super::counts::RlCounts;

/// Anything that can take expectations over next states.
pub trait TransitionModel<T: Scalar> {
    fn states(&self) -> usize;
    fn actions(&self) -> usize;
    fn horizon(&self) -> usize;
    /// Next-state distribution at 0-based step `h`.
    fn next_distribution(&self, h: usize, s: usize, a: usize) -> Vec<T>;

    /// `E_{P_h(·|s,a)}[values]`.
    fn expect(&self, h: usize, s: usize, a: usize, values: &[T]) -> T {
        self.next_distribution(h, s, a).iter().zip(values).map(|(&p, &v)| p * v).sum()
    }
}

impl<T: Scalar> TransitionModel<T> for RlCounts<T> {
    fn states(&self) -> usize {
        RlCounts::states(self)
    }
    fn actions(&self) -> usize {
        RlCounts::actions(self)
    }
    fn horizon(&self) -> usize {
        RlCounts::horizon(self)
    }
    fn next_distribution(&self, h: usize, s: usize, a: usize) -> Vec<T> {
        self.transition_row(h, s, a)
    }
}

impl<T: Scalar> TransitionModel<T> for TabularMdp<T> {
    fn states(&self) -> usize {
        TabularMdp::states(self)
    }
    fn actions(&self) -> usize {
        TabularMdp::actions(self)
    }
    fn horizon(&self) -> usize {
        TabularMdp::horizon(self)
    }
    fn next_distribution(&self, h: usize, s: usize, a: usize) -> Vec<T> {
        self.transition(h, s, a).to_vec()
    }
    fn expect(&self, h: usize, s: usize, a: usize, values: &[T]) -> T {
        self.transition(h, s, a).iter().zip(values).map(|(&p, &v)| p * v).sum()
    }
}

/// Value tables indexed by 0-based step. `V` tables have `H + 1` layers, the
/// last one identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTables<T> {
    pub states: usize,
    pub actions: usize,
    pub horizon: usize,
    /// `Q̄_h(s,a)`, `[h][s][a]`.
    pub q_upper: Vec<T>,
    /// `V̄_h(s)`, `[h][s]`.
    pub v_upper: Vec<T>,
    /// Pessimistic tables, optimistic-pessimistic iteration only.
    pub q_lower: Option<Vec<T>>,
    pub v_lower: Option<Vec<T>>,
    /// Greedy policy `π_h(s)`, `[h][s]`.
    pub policy: Vec<usize>,
}

impl<T: Scalar> ValueTables<T> {
    fn empty(states: usize, actions: usize, horizon: usize) -> Self {
        Self {
            states,
            actions,
            horizon,
            q_upper: vec![T::zero(); horizon * states * actions],
            v_upper: vec![T::zero(); (horizon + 1) * states],
            q_lower: None,
            v_lower: None,
            policy: vec![0; horizon * states],
        }
    }

    pub fn q(&self, h: usize, s: usize, a: usize) -> T {
        self.q_upper[(h * self.states + s) * self.actions + a]
    }

    pub fn v(&self, h: usize, s: usize) -> T {
        self.v_upper[h * self.states + s]
    }

    pub fn v_low(&self, h: usize, s: usize) -> Option<T> {
        self.v_lower.as_ref().map(|v| v[h * self.states + s])
    }

    pub fn action(&self, h: usize, s: usize) -> usize {
        self.policy[h * self.states + s]
    }

    /// Layer `h` of the optimistic value table.
    pub fn v_layer(&self, h: usize) -> &[T] {
        &self.v_upper[h * self.states..(h + 1) * self.states]
    }
}

/// Backward induction on `(model, rewards)` with `V_h(s) = min{max_a Q_h(s,a), H − h}`
/// for 1-based `h` (so the last layer is capped at zero).
///
/// `rewards` is `[h][s][a]`, typically empirical means plus bonuses.
pub fn truncated_vi<T: Scalar, M: TransitionModel<T>>(model: &M, rewards: &[T]) -> ValueTables<T> {
    let (ns, na, nh) = (model.states(), model.actions(), model.horizon());
    let mut out = ValueTables::empty(ns, na, nh);
    for h in (0..nh).rev() {
        let cap = T::count(nh - h - 1);
        let (head, tail) = out.v_upper.split_at_mut((h + 1) * ns);
        let next = &tail[..ns];
        let current = &mut head[h * ns..];
        for s in 0..ns {
            let row = &mut out.q_upper[(h * ns + s) * na..(h * ns + s + 1) * na];
            for (a, q) in row.iter_mut().enumerate() {
                *q = rewards[(h * ns + s) * na + a] + model.expect(h, s, a, next);
            }
            let best = argmax(row.iter().copied()).unwrap_or(0);
            out.policy[h * ns + s] = best;
            current[s] = row[best].min(cap);
        }
    }
    out
}

/// Upper and lower backward induction sharing the optimistic greedy policy.
///
/// `transition_bonus(h, s, a, V̄_{h+1}, V̲_{h+1})` may depend on the next-layer
/// tables. `V̄_h(s) = min{max_a Q̄_h(s,a), H − h + 1}` (1-based `h`) and
/// `V̲_h(s) = max{Q̲_h(s, π_h(s)), 0}`.
pub fn optimistic_pessimistic_vi<T, M, F>(
    model: &M,
    mean_rewards: &[T],
    reward_bonus: &[T],
    mut transition_bonus: F,
) -> ValueTables<T>
where
    T: Scalar,
    M: TransitionModel<T>,
    F: FnMut(usize, usize, usize, &[T], &[T]) -> T,
{
    let (ns, na, nh) = (model.states(), model.actions(), model.horizon());
    let mut out = ValueTables::empty(ns, na, nh);
    let mut q_lower = vec![T::zero(); nh * ns * na];
    let mut v_lower = vec![T::zero(); (nh + 1) * ns];
    for h in (0..nh).rev() {
        let cap = T::count(nh - h);
        let upper_next = out.v_upper[(h + 1) * ns..(h + 2) * ns].to_vec();
        let lower_next = v_lower[(h + 1) * ns..(h + 2) * ns].to_vec();
        for s in 0..ns {
            let base = (h * ns + s) * na;
            for a in 0..na {
                let i = base + a;
                let bonus = reward_bonus[i] + transition_bonus(h, s, a, &upper_next, &lower_next);
                out.q_upper[i] = mean_rewards[i] + bonus + model.expect(h, s, a, &upper_next);
                q_lower[i] = mean_rewards[i] - bonus + model.expect(h, s, a, &lower_next);
            }
            let best = argmax(out.q_upper[base..base + na].iter().copied()).unwrap_or(0);
            out.policy[h * ns + s] = best;
            out.v_upper[h * ns + s] = out.q_upper[base + best].min(cap);
            v_lower[h * ns + s] = q_lower[base + best].max(T::zero());
        }
    }
    out.q_lower = Some(q_lower);
    out.v_lower = Some(v_lower);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Two states; action 0 stays, action 1 switches. Deterministic.
    fn chain(horizon: usize, rewards: [[f64; 2]; 2]) -> TabularMdp<f64> {
        let layer = vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![0.0, 1.0], vec![1.0, 0.0]]];
        let r = vec![rewards.iter().map(|row| row.to_vec()).collect::<Vec<_>>(); horizon];
        TabularMdp::new(vec![layer; horizon], r, vec![1.0, 0.0]).unwrap()
    }

    #[test]
    fn zero_model_gives_zero_values() {
        let mdp = chain(3, [[0.0, 0.0], [0.0, 0.0]]);
        let tables = truncated_vi(&mdp, &vec![0.0; 3 * 2 * 2]);
        assert!(tables.q_upper.iter().all(|&q| q == 0.0));
        assert!(tables.v_upper.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn truncation_binds_with_unit_rewards() {
        let mdp = chain(3, [[0.0, 0.0], [0.0, 0.0]]);
        let tables = truncated_vi(&mdp, &vec![1.0; 3 * 2 * 2]);
        assert_eq!(tables.v(2, 0), 0.0);
        assert_eq!(tables.v(1, 0), 1.0);
        assert_eq!(tables.v(0, 0), 2.0);
        assert_eq!(tables.q(0, 0, 0), 2.0);
    }

    #[test]
    fn optimistic_pessimistic_saturation() {
        let mdp = chain(3, [[0.2, 0.0], [0.0, 0.5]]);
        let means = vec![0.1; 12];
        let tables = optimistic_pessimistic_vi(&mdp, &means, &vec![1e6; 12], |_, _, _, _, _| 1e6);
        for h in 0..3 {
            for s in 0..2 {
                assert_eq!(tables.v(h, s), (3 - h) as f64);
                assert_eq!(tables.v_low(h, s), Some(0.0));
            }
        }
    }

    #[test]
    fn zero_bonus_interval_collapses() {
        let mdp = chain(3, [[0.2, 0.0], [0.0, 0.5]]);
        let means: Vec<f64> = (0..3)
            .flat_map(|h| (0..2).flat_map(move |s| (0..2).map(move |a| (s, a, h))))
            .map(|(s, a, h)| mdp.reward(h, s, a))
            .collect();
        let tables = optimistic_pessimistic_vi(&mdp, &means, &vec![0.0; 12], |_, _, _, _, _| 0.0);
        for h in 0..3 {
            for s in 0..2 {
                assert_relative_eq!(tables.v(h, s), tables.v_low(h, s).unwrap(), epsilon = 1e-15);
            }
        }
        // e.g. collect 0.2, switch for free, then take the 0.5 switch back
        assert_relative_eq!(tables.v(0, 0), 0.7, epsilon = 1e-15);
    }
}
