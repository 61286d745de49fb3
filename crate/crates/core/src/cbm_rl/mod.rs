//! Tabular episodic RL with budgeted reward queries: CBM-UCBVI and CBM-ULCVI.
//!
//! Transitions along the played trajectory are always observed; rewards are
//! observed only at the steps the query rule selects.

mod agent;
mod bonus;
mod counts;
mod oracle;
mod vi;

pub use agent::{CbmRlAgent, Episode, RlConfig};
pub use bonus::{
    log_term, rl_query_threshold, rl_reward_bonus, rl_should_query, ucbvi_transition_bonus, ulcvi_transition_bonus,
    variance_under, RlVariant,
};
pub use counts::{empirical_reward_variance, RewardStats, RlCounts};
pub use oracle::{optimal_values, policy_values, ExactValues};
pub use vi::{optimistic_pessimistic_vi, truncated_vi, TransitionModel, ValueTables};
