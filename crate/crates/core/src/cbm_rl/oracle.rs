//! Exact dynamic programming on a known MDP, used to score pseudo-regret.

use crate::env::TabularMdp;
use crate::scalar::{argmax, Scalar};

/// Values of the true MDP, `[h][s]` with `H + 1` layers (last is zero).
#[derive(Debug, Clone, PartialEq)]
pub struct ExactValues<T> {
    pub states: usize,
    pub values: Vec<T>,
    /// Optimal policy `[h][s]` when produced by [`optimal_values`].
    pub policy: Vec<usize>,
}

impl<T: Scalar> ExactValues<T> {
    pub fn v(&self, h: usize, s: usize) -> T {
        self.values[h * self.states + s]
    }
}

/// `V*` and an optimal deterministic policy (ties to the lowest action).
pub fn optimal_values<T: Scalar>(mdp: &TabularMdp<T>) -> ExactValues<T> {
    let (ns, na, nh) = (mdp.states(), mdp.actions(), mdp.horizon());
    let mut values = vec![T::zero(); (nh + 1) * ns];
    let mut policy = vec![0; nh * ns];
    for h in (0..nh).rev() {
        let (head, tail) = values.split_at_mut((h + 1) * ns);
        let next = &tail[..ns];
        for s in 0..ns {
            let q = (0..na).map(|a| mdp.reward(h, s, a) + dot(mdp.transition(h, s, a), next));
            let qs: Vec<T> = q.collect();
            let best = argmax(qs.iter().copied()).unwrap_or(0);
            policy[h * ns + s] = best;
            head[h * ns + s] = qs[best];
        }
    }
    ExactValues { states: ns, values, policy }
}

/// `V^π` for a deterministic non-stationary policy given as `[h][s]`.
pub fn policy_values<T: Scalar>(mdp: &TabularMdp<T>, policy: &[usize]) -> ExactValues<T> {
    let (ns, nh) = (mdp.states(), mdp.horizon());
    let mut values = vec![T::zero(); (nh + 1) * ns];
    for h in (0..nh).rev() {
        let (head, tail) = values.split_at_mut((h + 1) * ns);
        let next = &tail[..ns];
        for s in 0..ns {
            let a = policy[h * ns + s];
            head[h * ns + s] = mdp.reward(h, s, a) + dot(mdp.transition(h, s, a), next);
        }
    }
    ExactValues { states: ns, values, policy: policy.to_vec() }
}

fn dot<T: Scalar>(p: &[T], v: &[T]) -> T {
    p.iter().zip(v).map(|(&a, &b)| a * b).sum()
}
