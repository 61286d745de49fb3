//! JSON experiment configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use cbm_core::adversary::AdversaryMode;
use cbm_core::cbm_rl::RlVariant;
use cbm_core::env::{ActionSets, LinearNoise, RewardLaw};
use cbm_core::{BudgetProfile, QueryRule};

use crate::curves::CurveSpec;
use crate::error::{HarnessError, Result};

fn default_replications() -> usize {
    1
}

fn default_true() -> bool {
    true
}

fn default_delta() -> f64 {
    0.1
}

fn bernoulli() -> RewardLaw<f64> {
    RewardLaw::Bernoulli
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    /// Master seed.
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Rounds (bandits) or episodes (RL).
    pub horizon: usize,
    pub environment: EnvSpec,
    pub algorithm: AlgSpec,
    pub budget: BudgetSpec,
    /// Context source; derived from the environment and budget when absent.
    #[serde(default)]
    pub contexts: Option<ContextSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    /// Worker threads for replications; all cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Write one trace CSV per replication.
    #[serde(default = "default_true")]
    pub traces: bool,
    /// Write `chart.svg`.
    #[serde(default)]
    pub svg: bool,
    /// Reference curves drawn on the chart.
    #[serde(default)]
    pub overlays: Vec<CurveSpec>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { traces: true, svg: false, overlays: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvSpec {
    Mab {
        means: Vec<f64>,
        #[serde(default = "bernoulli")]
        reward: RewardLaw<f64>,
    },
    /// `arms` means evenly spaced on `[low, high]`, best arm last.
    EvenlySpaced {
        arms: usize,
        low: f64,
        high: f64,
        #[serde(default = "bernoulli")]
        reward: RewardLaw<f64>,
    },
    Cmab {
        means: Vec<Vec<f64>>,
        #[serde(default = "bernoulli")]
        reward: RewardLaw<f64>,
    },
    /// Two contexts, two arms, means `[[½, ½], [0, 1]]`.
    FundedContext,
    Linear {
        theta: Vec<f64>,
        noise: LinearNoise<f64>,
        action_sets: ActionSets<f64>,
    },
    Mdp {
        transitions: Vec<Vec<Vec<Vec<f64>>>>,
        rewards: Vec<Vec<Vec<f64>>>,
        initial: Vec<f64>,
    },
    RandomMdp {
        states: usize,
        actions: usize,
        horizon: usize,
        reward_density: f64,
        reward_max: f64,
        /// Seed of the instance draw; the master seed when absent.
        #[serde(default)]
        instance_seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum AlgSpec {
    #[serde(rename = "greedy")]
    Greedy {
        #[serde(default)]
        costs: Option<Vec<f64>>,
    },
    #[serde(rename = "cbm-ucb")]
    CbmUcb {
        #[serde(default)]
        costs: Option<Vec<f64>>,
        #[serde(default)]
        query: QueryRule,
    },
    #[serde(rename = "cbm-oful")]
    CbmOful {
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        lambda: Option<f64>,
        /// Noise subgaussian parameter; ½ for Bernoulli noise, the standard
        /// deviation for Gaussian noise when absent.
        #[serde(default)]
        sigma: Option<f64>,
        /// Bound `L` on action norms; taken from the environment when absent.
        #[serde(default)]
        max_action_norm: Option<f64>,
        /// Bound `D` on `‖θ*‖`; taken from the environment when absent.
        #[serde(default)]
        theta_bound: Option<f64>,
        #[serde(default)]
        query: QueryRule,
    },
    #[serde(rename = "cbm-ucbvi")]
    CbmUcbvi {
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        reward_support: Option<usize>,
        #[serde(default)]
        query: QueryRule,
    },
    #[serde(rename = "cbm-ulcvi")]
    CbmUlcvi {
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        reward_support: Option<usize>,
        #[serde(default)]
        query: QueryRule,
    },
}

impl AlgSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Greedy { .. } => "greedy",
            Self::CbmUcb { .. } => "cbm-ucb",
            Self::CbmOful { .. } => "cbm-oful",
            Self::CbmUcbvi { .. } => "cbm-ucbvi",
            Self::CbmUlcvi { .. } => "cbm-ulcvi",
        }
    }

    pub fn rl_variant(&self) -> Option<RlVariant> {
        match self {
            Self::CbmUcbvi { .. } => Some(RlVariant::Ucbvi),
            Self::CbmUlcvi { .. } => Some(RlVariant::Ulcvi),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BudgetSpec {
    Linear { epsilon: f64 },
    Polynomial { exponent: f64 },
    Fixed { value: f64 },
    Periodic { initial: f64, period: usize },
    Step { increment: f64, every: usize },
    /// Explicit `B(1), B(2), …`; the last value repeats.
    Sequence { values: Vec<f64> },
    /// `B(t) = B(t−1) + 1{u_t = 0}` against the two-context instance.
    FundedContext { mode: AdversaryMode },
}

impl BudgetSpec {
    /// Closed-form profile, when the budget is one.
    pub fn profile(&self) -> Option<BudgetProfile<f64>> {
        Some(match *self {
            Self::Linear { epsilon } => BudgetProfile::Linear { epsilon },
            Self::Polynomial { exponent } => BudgetProfile::Polynomial { exponent },
            Self::Fixed { value } => BudgetProfile::Fixed { value },
            Self::Periodic { initial, period } => BudgetProfile::Periodic { initial, period },
            Self::Step { increment, every } => BudgetProfile::Step { increment, every },
            Self::Sequence { .. } | Self::FundedContext { .. } => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContextSpec {
    Fixed { context: usize },
    Uniform { count: usize },
    Categorical { weights: Vec<f64> },
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| HarnessError::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let config: Self = serde_json::from_value(value).map_err(|e| HarnessError::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Checks the parts that do not need the environment to be built.
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(HarnessError::config("horizon must be at least 1"));
        }
        if self.replications == 0 {
            return Err(HarnessError::config("replications must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(HarnessError::config("threads must be at least 1"));
        }
        if let Some(profile) = self.budget.profile() {
            profile.validate().map_err(|e| HarnessError::config(e.to_string()))?;
        }
        if let BudgetSpec::Sequence { values } = &self.budget {
            if values.is_empty() {
                return Err(HarnessError::config("budget sequence is empty"));
            }
        }
        if let Some(ContextSpec::Uniform { count: 0 }) = self.contexts {
            return Err(HarnessError::config("uniform contexts need a positive count"));
        }
        Ok(())
    }
}
