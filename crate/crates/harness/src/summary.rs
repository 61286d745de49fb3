//! Cross-replication statistics at checkpoint rounds.

use cbm_core::Trace;

/// Rounds `⌊10^{k/10}⌉` for `k = 0, 1, …` that do not exceed `horizon`,
/// deduplicated, followed by `horizon` itself.
pub fn log_checkpoints(horizon: usize) -> Vec<usize> {
    let mut ts: Vec<usize> = Vec::new();
    for k in 0.. {
        let t = 10f64.powf(f64::from(k) / 10.0).round() as usize;
        if t >= horizon {
            break;
        }
        if ts.last() != Some(&t) {
            ts.push(t);
        }
    }
    if horizon > 0 {
        ts.push(horizon);
    }
    ts
}

/// Cumulative regret and query cost of one replication at the checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointSeries {
    pub regret: Vec<f64>,
    pub budget_used: Vec<f64>,
}

impl CheckpointSeries {
    pub fn from_trace(trace: &Trace, checkpoints: &[usize]) -> Self {
        let rows = trace.rows();
        let at = |t: usize| &rows[t - 1];
        Self {
            regret: checkpoints.iter().map(|&t| at(t).regret_cum).collect(),
            budget_used: checkpoints.iter().map(|&t| at(t).budget_used).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub t: usize,
    pub regret_mean: f64,
    /// Sample standard deviation (`n − 1` denominator); 0 for one replication.
    pub regret_std: f64,
    pub regret_min: f64,
    pub regret_max: f64,
    pub budget_used_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryTable {
    pub replications: usize,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    /// Combines the series in the order given.
    pub fn from_series(checkpoints: &[usize], series: &[CheckpointSeries]) -> Self {
        let n = series.len();
        let rows = checkpoints
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let regret: Vec<f64> = series.iter().map(|s| s.regret[i]).collect();
                let mean = regret.iter().sum::<f64>() / n as f64;
                let std = if n > 1 {
                    (regret.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
                } else {
                    0.0
                };
                SummaryRow {
                    t,
                    regret_mean: mean,
                    regret_std: std,
                    regret_min: regret.iter().copied().fold(f64::INFINITY, f64::min),
                    regret_max: regret.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    budget_used_mean: series.iter().map(|s| s.budget_used[i]).sum::<f64>() / n as f64,
                }
            })
            .collect();
        Self { replications: n, rows }
    }

    pub fn last(&self) -> Option<&SummaryRow> {
        self.rows.last()
    }

    pub fn at(&self, t: usize) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.t == t)
    }
}
