//! CBM-OFUL: optimism over a confidence ellipsoid built from regularized
//! least squares on the queried rounds only.
//!
//! Unqueried rounds contribute nothing to the design matrix or the target,
//! so `V_t = λI + Σ_{queried} x xᵀ` and `θ̂_t = V_t⁻¹ Σ_{queried} x R`.

use serde::{Deserialize, Serialize};

use crate::env::dot;
use crate::error::{Error, Result};
use crate::linalg::{solve_dense, Cholesky, Matrix};
use crate::scalar::{argmax, Scalar};

/// Hyperparameters of CBM-OFUL.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfulParams<T> {
    pub dim: usize,
    /// Confidence level `δ ∈ (0,1)`.
    pub delta: T,
    /// Ridge parameter `λ > 0`.
    pub lambda: T,
    /// Subgaussian noise scale `σ`.
    pub sigma: T,
    /// Bound `L` on action norms.
    pub max_action_norm: T,
    /// Bound `D` on `‖θ*‖₂`.
    pub theta_bound: T,
}

impl<T: Scalar> OfulParams<T> {
    /// Uses the default ridge `λ = max{D^{−1/2}, 1}`.
    pub fn new(dim: usize, delta: T, sigma: T, max_action_norm: T, theta_bound: T) -> Self {
        let lambda = if theta_bound > T::zero() { theta_bound.powf(T::lit(-0.5)).max(T::one()) } else { T::one() };
        Self { dim, delta, lambda, sigma, max_action_norm, theta_bound }
    }

    pub fn with_lambda(mut self, lambda: T) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.dim >= 1
            && self.delta > T::zero()
            && self.delta < T::one()
            && self.lambda > T::zero()
            && self.sigma >= T::zero()
            && self.max_action_norm > T::zero()
            && self.theta_bound >= T::zero();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid CBM-OFUL parameters {self:?}")))
        }
    }

    /// Ellipsoid radius
    /// `l_t = max{1, σ·√(2d·ln((1 + t·L²/λ)/δ)) + √λ·D}`.
    pub fn radius(&self, t: usize) -> T {
        let d = T::count(self.dim);
        let l2 = self.max_action_norm * self.max_action_norm;
        let log = ((T::one() + T::count(t) * l2 / self.lambda) / self.delta).ln();
        let r = self.sigma * (T::lit(2.0) * d * log).sqrt() + self.lambda.sqrt() * self.theta_bound;
        r.max(T::one())
    }

    /// `v_s = √(2d·ln(1 + s·L²/(d·λ)))`, evaluated at a real argument since it
    /// is applied to budgets.
    pub fn potential_scale(&self, s: T) -> T {
        let d = T::count(self.dim);
        let l2 = self.max_action_norm * self.max_action_norm;
        (T::lit(2.0) * d * (T::one() + s * l2 / (d * self.lambda)).ln()).sqrt()
    }
}

/// Design matrix, target vector and estimator of CBM-OFUL.
#[derive(Debug, Clone)]
pub struct LinCbmState<T> {
    params: OfulParams<T>,
    design: Matrix<T>,
    factor: Cholesky<T>,
    target: Vec<T>,
    theta: Vec<T>,
    round: usize,
    queries: usize,
}

impl<T: Scalar> LinCbmState<T> {
    pub fn new(params: OfulParams<T>) -> Result<Self> {
        params.validate()?;
        let design = Matrix::scaled_identity(params.dim, params.lambda);
        let factor = design.cholesky()?;
        Ok(Self {
            params,
            design,
            factor,
            target: vec![T::zero(); params.dim],
            theta: vec![T::zero(); params.dim],
            round: 1,
            queries: 0,
        })
    }

    pub fn params(&self) -> &OfulParams<T> {
        &self.params
    }

    pub fn design(&self) -> &Matrix<T> {
        &self.design
    }

    pub fn target(&self) -> &[T] {
        &self.target
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    /// `l_{t−1}` for the current round `t`.
    pub fn current_radius(&self) -> T {
        self.params.radius(self.round - 1)
    }

    /// `‖x‖²_{V⁻¹}`.
    pub fn inv_norm_sq(&self, x: &[T]) -> T {
        self.factor.inv_quad_form(x)
    }

    /// `‖x‖_{V⁻¹}`.
    pub fn inv_norm(&self, x: &[T]) -> T {
        self.inv_norm_sq(x).sqrt()
    }

    /// `⟨x, θ̂⟩ + l_{t−1}·‖x‖_{V⁻¹}`, the largest value of `⟨x, θ⟩` over the
    /// confidence ellipsoid.
    pub fn ucb_value(&self, x: &[T]) -> T {
        dot(x, &self.theta) + self.current_radius() * self.inv_norm(x)
    }

    /// Optimistic action; ties go to the lowest index.
    pub fn select(&self, actions: &[Vec<T>]) -> usize {
        argmax(actions.iter().map(|x| self.ucb_value(x))).unwrap_or(0)
    }

    /// `CI_t(x) = 2·l_{t−1}·min{‖x‖_{V⁻¹}, 1}`; reported, not used by the rule.
    pub fn confidence_width(&self, x: &[T]) -> T {
        T::lit(2.0) * self.current_radius() * self.inv_norm(x).min(T::one())
    }

    /// `‖x‖_{V⁻¹} ≥ v_{B(t)}/√B(t)`, compared in squared form. Budgets below
    /// one never query.
    pub fn should_query(&self, x: &[T], budget: T) -> bool {
        if !(budget >= T::one()) {
            return false;
        }
        let v = self.params.potential_scale(budget);
        self.inv_norm_sq(x) >= v * v / budget
    }

    /// Adds a queried row and refreshes the estimator from a fresh factorization.
    pub fn update(&mut self, x: &[T], reward: T) -> Result<()> {
        if x.len() != self.params.dim {
            return Err(Error::InvalidParameter("action dimension mismatch".into()));
        }
        self.design.add_outer(x);
        for (s, &xi) in self.target.iter_mut().zip(x) {
            *s += xi * reward;
        }
        self.factor = self.design.cholesky()?;
        self.theta = self.factor.solve(&self.target);
        self.queries += 1;
        Ok(())
    }

    pub fn end_round(&mut self) {
        self.round += 1;
    }
}

/// Ridge regression from scratch: solves `(λI + Σ x xᵀ)·θ = Σ x·y` by
/// Gaussian elimination. Independent of [`LinCbmState`]'s incremental path.
pub fn batch_ls_oracle<T: Scalar>(rows: &[(Vec<T>, T)], dim: usize, lambda: T) -> Result<Vec<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::InvalidParameter("ridge parameter must be positive".into()));
    }
    let mut gram = Matrix::scaled_identity(dim, lambda);
    let mut rhs = vec![T::zero(); dim];
    for (x, y) in rows {
        for i in 0..dim {
            rhs[i] += x[i] * *y;
            for j in 0..dim {
                gram[(i, j)] += x[i] * x[j];
            }
        }
    }
    solve_dense(&gram, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(dim: usize) -> OfulParams<f64> {
        OfulParams::new(dim, 0.1, 1.0, 1.0, 1.0).with_lambda(1.0)
    }

    #[test]
    fn radius_examples() {
        let p = params(2);
        let expected = (4.0 * 10f64.ln()).sqrt() + 1.0;
        assert_relative_eq!(p.radius(0), expected, epsilon = 1e-14);
        assert_relative_eq!(p.radius(0), 4.035, epsilon = 1e-3);
        let degenerate = OfulParams { sigma: 0.0, theta_bound: 0.0, ..p };
        assert_eq!(degenerate.radius(100), 1.0);
        for t in 0..200 {
            assert!(p.radius(t + 1) >= p.radius(t));
        }
    }

    #[test]
    fn default_ridge() {
        assert_eq!(OfulParams::new(2, 0.1, 1.0, 1.0, 4.0).lambda, 1.0);
        assert_relative_eq!(OfulParams::new(2, 0.1, 1.0, 1.0, 0.25).lambda, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn ucb_identity_design() {
        let state = LinCbmState::new(params(2)).unwrap();
        // l_0 = radius(0) with identity design: ⟨x, 0⟩ + l·1
        assert_relative_eq!(state.ucb_value(&[1.0, 0.0]), state.current_radius(), epsilon = 1e-15);
        assert_eq!(state.ucb_value(&[0.0, 0.0]), 0.0);
        let unit_radius = LinCbmState::new(OfulParams { sigma: 0.0, theta_bound: 2.0, ..params(2) }).unwrap();
        assert_relative_eq!(unit_radius.ucb_value(&[1.0, 0.0]), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn single_update_hand_solve() {
        let p = OfulParams { sigma: 0.0, theta_bound: 1.0, ..params(2) };
        let mut state = LinCbmState::new(p).unwrap();
        state.update(&[1.0, 0.0], 1.0).unwrap();
        state.end_round();
        assert_eq!(state.design()[(0, 0)], 2.0);
        assert_eq!(state.design()[(1, 1)], 1.0);
        assert_relative_eq!(state.theta()[0], 0.5, epsilon = 1e-15);
        assert_eq!(state.theta()[1], 0.0);
        assert_eq!(state.current_radius(), 1.0);
        assert_relative_eq!(state.ucb_value(&[1.0, 0.0]), 0.5 + 0.5f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(state.ucb_value(&[1.0, 0.0]), 1.2071, epsilon = 1e-4);
        let oracle = batch_ls_oracle(&[(vec![1.0, 0.0], 1.0)], 2, 1.0).unwrap();
        assert_relative_eq!(oracle[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn query_rule_example() {
        let state = LinCbmState::new(params(2)).unwrap();
        let threshold = state.params().potential_scale(4.0) / 2.0;
        assert_relative_eq!(threshold, (4.0 * 3f64.ln()).sqrt() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(threshold, 1.048, epsilon = 1e-3);
        assert!(!state.should_query(&[1.0, 0.0], 4.0));
        assert!(!state.should_query(&[1.0, 0.0], 0.0));
        assert!(!state.should_query(&[1.0, 0.0], 0.5));
    }

    #[test]
    fn uninformed_direction_queries() {
        let p = params(2).with_lambda(1e-6);
        let mut state = LinCbmState::new(p).unwrap();
        for _ in 0..5 {
            state.update(&[1.0, 0.0], 0.3).unwrap();
        }
        assert!(state.inv_norm(&[0.0, 1.0]) > 100.0);
        assert!(state.should_query(&[0.0, 1.0], 50.0));
    }

    #[test]
    fn skipped_rounds_leave_state_unchanged() {
        let mut state = LinCbmState::new(params(3)).unwrap();
        state.update(&[0.2, 0.1, 0.0], 0.7).unwrap();
        let (v, theta) = (state.design().clone(), state.theta().to_vec());
        state.end_round();
        state.end_round();
        assert_eq!(state.design(), &v);
        assert_eq!(state.theta(), &theta[..]);
    }

    #[test]
    fn repeated_rows_add_twice() {
        let mut state = LinCbmState::new(params(2)).unwrap();
        let x = [0.6, -0.8];
        state.update(&x, 0.0).unwrap();
        state.update(&x, 0.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 } + 2.0 * x[i] * x[j];
                assert_relative_eq!(state.design()[(i, j)], expected, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn empty_oracle_is_prior() {
        assert_eq!(batch_ls_oracle::<f64>(&[], 3, 1.0).unwrap(), vec![0.0; 3]);
        assert!(batch_ls_oracle::<f64>(&[], 3, 0.0).is_err());
    }

    #[test]
    fn confidence_width_caps_norm() {
        let state = LinCbmState::new(params(2)).unwrap();
        let l = state.current_radius();
        assert_relative_eq!(state.confidence_width(&[3.0, 0.0]), 2.0 * l, epsilon = 1e-14);
        assert_relative_eq!(state.confidence_width(&[0.5, 0.0]), l, epsilon = 1e-14);
    }
}
