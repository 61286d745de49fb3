//! Reference curves: lower bounds and budget-profile predictions.

use serde::{Deserialize, Serialize};

use cbm_core::bounds::{self, BoundCurve};
use cbm_core::BudgetProfile;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    /// Unit-cost MAB lower bound at a fixed budget.
    MabUnit {
        arms: usize,
        budget: f64,
        #[serde(default)]
        label: Option<String>,
    },
    /// MAB lower bound with per-arm costs at a fixed budget.
    MabCosts {
        costs: Vec<f64>,
        budget: f64,
        #[serde(default)]
        label: Option<String>,
    },
    /// MAB lower bound for a budget that follows a profile over time.
    MabVarying {
        costs: Vec<f64>,
        budget: BudgetProfile<f64>,
        #[serde(default)]
        label: Option<String>,
    },
    /// Linear-bandit lower bound at a fixed budget; only drawn where `B ≤ t`.
    Linear {
        dim: usize,
        budget: f64,
        #[serde(default)]
        label: Option<String>,
    },
    /// Regret order predicted for a budget profile (constants set to one).
    Predicted {
        arms: usize,
        budget: BudgetProfile<f64>,
        #[serde(default)]
        label: Option<String>,
    },
}

impl CurveSpec {
    pub fn label(&self) -> String {
        let (given, default) = match self {
            Self::MabUnit { label, .. } => (label, "mab_lb_unit"),
            Self::MabCosts { label, .. } => (label, "mab_lb_costs"),
            Self::MabVarying { label, .. } => (label, "mab_lb_varying"),
            Self::Linear { label, .. } => (label, "lin_lb"),
            Self::Predicted { label, .. } => (label, "predicted"),
        };
        given.clone().unwrap_or_else(|| default.to_string())
    }

    /// Evaluates the curve at each `t` in `ts` (ascending).
    pub fn evaluate(&self, ts: &[usize]) -> Result<BoundCurve<f64>> {
        let label = self.label();
        let core = |e: cbm_core::Error| HarnessError::config(format!("curve {label}: {e}"));
        let check_arms = |arms: usize| {
            if arms < 2 {
                Err(HarnessError::config(format!("curve {label}: needs at least two arms")))
            } else {
                Ok(())
            }
        };
        let curve = match self {
            Self::MabUnit { arms, budget, .. } => {
                check_arms(*arms)?;
                BoundCurve::from_fn(label.clone(), ts.iter().copied(), |t| bounds::mab_lb_unit(t, *arms, *budget))
            }
            Self::MabCosts { costs, budget, .. } => {
                check_arms(costs.len())?;
                BoundCurve::from_fn(label.clone(), ts.iter().copied(), |t| bounds::mab_lb_costs(t, costs, *budget))
            }
            Self::MabVarying { costs, budget, .. } => {
                check_arms(costs.len())?;
                budget.validate().map_err(core)?;
                let horizon = ts.last().copied().unwrap_or(0);
                let schedule: Vec<f64> = (1..=horizon).map(|t| budget.value(t)).collect();
                BoundCurve::from_fn(label.clone(), ts.iter().copied(), |t| {
                    bounds::mab_lb_varying(&schedule[..t], costs)
                })
            }
            Self::Linear { dim, budget, .. } => {
                let mut points = Vec::new();
                for &t in ts {
                    if *budget <= t as f64 {
                        points.push((t, bounds::lin_lb(t, *dim, *budget).map_err(core)?));
                    }
                }
                BoundCurve { label: label.clone(), points }
            }
            Self::Predicted { arms, budget, .. } => {
                check_arms(*arms)?;
                budget.validate().map_err(core)?;
                let points = ts
                    .iter()
                    .map(|&t| Ok((t, bounds::predicted_regret(budget, *arms, t).map_err(core)?)))
                    .collect::<Result<_>>()?;
                BoundCurve { label: label.clone(), points }
            }
        };
        if curve.points.iter().any(|(_, v)| !v.is_finite() || *v < 0.0) {
            return Err(HarnessError::config(format!("curve {label}: produced a negative or non-finite value")));
        }
        Ok(curve)
    }
}

/// Config of the `bounds` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub horizon: usize,
    pub curves: Vec<CurveSpec>,
    #[serde(default)]
    pub svg: bool,
}

impl BoundsConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| HarnessError::config(e.to_string()))?;
        if config.horizon == 0 {
            return Err(HarnessError::config("horizon must be at least 1"));
        }
        let mut labels: Vec<String> = config.curves.iter().map(CurveSpec::label).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(HarnessError::config("curve labels must be unique"));
        }
        Ok(config)
    }
}
