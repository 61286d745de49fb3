//! Context sources: stochastic laws and adaptive adversaries.

use rand::Rng;

use crate::env::sample_categorical;
use crate::rng::Stream;
use crate::scalar::Scalar;
use crate::trace::RunTrace;

/// Produces the context `u_t` of round `t` from the observed history
/// (rounds `1..t`). In RL the context is the initial state of the episode.
pub trait ContextLaw<T>: Send {
    fn next_context(&mut self, t: usize, history: &RunTrace<T>, rng: &mut Stream) -> usize;
}

/// Always the same context.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedContext(pub usize);

impl<T> ContextLaw<T> for FixedContext {
    fn next_context(&mut self, _: usize, _: &RunTrace<T>, _: &mut Stream) -> usize {
        self.0
    }
}

/// I.i.d. uniform over `0..n`.
#[derive(Debug, Clone, Copy)]
pub struct UniformContexts(pub usize);

impl<T> ContextLaw<T> for UniformContexts {
    fn next_context(&mut self, _: usize, _: &RunTrace<T>, rng: &mut Stream) -> usize {
        rng.random_range(0..self.0)
    }
}

/// I.i.d. draws from a fixed distribution.
#[derive(Debug, Clone)]
pub struct CategoricalContexts<T>(pub Vec<T>);

impl<T: Scalar> ContextLaw<T> for CategoricalContexts<T> {
    fn next_context(&mut self, _: usize, _: &RunTrace<T>, rng: &mut Stream) -> usize {
        sample_categorical(&self.0, rng)
    }
}
