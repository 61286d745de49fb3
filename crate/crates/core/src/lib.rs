//! Sequential learning under a query budget.
//!
//! The learner sees a non-decreasing budget `B(t)` and may observe the reward
//! of the round only by paying for a query; the running cost `B^q(t)` must
//! never exceed `B(t)`. This crate holds the environments, the budget and
//! context sources (including adaptive adversaries), the greedy reduction,
//! confidence-budget matching for multi-armed bandits, linear bandits and
//! tabular episodic RL, exact oracles used for testing, and closed-form
//! reference bounds.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64` unless they end in `32`.

pub mod adversary;
pub mod bounds;
pub mod budget;
pub mod cbm_linear;
pub mod cbm_mab;
pub mod cbm_rl;
pub mod context;
pub mod env;
pub mod error;
pub mod greedy;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod trace;

pub use budget::{AdaptiveBudget, BudgetProfile, BudgetSchedule, QueryLedger};
pub use cbm_mab::QueryRule;
pub use context::ContextLaw;
pub use error::{Error, Result};
pub use rng::{rng_stream, RunStreams, Stream};
pub use scalar::Scalar;
pub use trace::{RunTrace, TraceRow};

pub type MabCbm = cbm_mab::MabCbmState<f64>;
pub type MabCbm32 = cbm_mab::MabCbmState<f32>;
pub type LinCbm = cbm_linear::LinCbmState<f64>;
pub type LinCbm32 = cbm_linear::LinCbmState<f32>;
pub type RlAgent = cbm_rl::CbmRlAgent<f64>;
pub type RlAgent32 = cbm_rl::CbmRlAgent<f32>;
pub type Trace = RunTrace<f64>;
pub type Trace32 = RunTrace<f32>;
pub type Schedule = BudgetSchedule<f64>;
pub type Mdp = env::TabularMdp<f64>;
pub type BanditEnv = env::MabEnv<f64>;
pub type ContextualEnv = env::CmabEnv<f64>;
pub type LinearEnv = env::LinBanditEnv<f64>;
