//! Replications in parallel, merged in replication order.

use std::path::Path;

use rayon::prelude::*;

use cbm_core::Trace;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::output::{ensure_dir, summary_csv, trace_csv, write_atomic};
use crate::setup::Prepared;
use crate::summary::{log_checkpoints, CheckpointSeries, SummaryTable};
use crate::svg::render_chart;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the config's thread count.
    pub threads: Option<usize>,
    /// Keep every trace in memory and return it.
    pub keep_traces: bool,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub checkpoints: Vec<usize>,
    pub series: Vec<CheckpointSeries>,
    pub summary: SummaryTable,
    /// Empty unless [`RunOptions::keep_traces`] was set.
    pub traces: Vec<Trace>,
}

/// Runs every replication of `config` and, when `out` is given, writes
/// `summary.csv`, `config.json`, per-replication traces under `traces/` and
/// optionally `chart.svg`.
pub fn run_experiment(config: &ExperimentConfig, out: Option<&Path>, options: &RunOptions) -> Result<Experiment> {
    let prepared = Prepared::new(config.clone())?;
    let threads = options.threads.or(config.threads);
    if threads == Some(0) {
        return Err(HarnessError::config("threads must be at least 1"));
    }
    let checkpoints = log_checkpoints(config.horizon);
    if let Some(dir) = out {
        ensure_dir(dir)?;
    }
    let write_traces = out.filter(|_| config.output.traces).map(|dir| dir.join("traces"));

    let one = |rep: usize| -> Result<(CheckpointSeries, Option<Trace>)> {
        let trace = prepared.run_replication(rep as u64)?;
        if let Some(dir) = &write_traces {
            write_atomic(&dir.join(format!("rep_{rep:04}.csv")), trace_csv(&trace).as_bytes())?;
        }
        let series = CheckpointSeries::from_trace(&trace, &checkpoints);
        Ok((series, options.keep_traces.then_some(trace)))
    };
    let reps = 0..config.replications;
    let results: Vec<Result<_>> = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::config(format!("thread pool: {e}")))?
            .install(|| reps.into_par_iter().map(one).collect()),
        None => reps.into_par_iter().map(one).collect(),
    };

    let mut series = Vec::with_capacity(config.replications);
    let mut traces = Vec::new();
    for result in results {
        let (s, t) = result?;
        series.push(s);
        traces.extend(t);
    }
    let summary = SummaryTable::from_series(&checkpoints, &series);

    if let Some(dir) = out {
        write_atomic(&dir.join("summary.csv"), summary_csv(&summary).as_bytes())?;
        let resolved = serde_json::to_string_pretty(config).map_err(|e| HarnessError::config(e.to_string()))?;
        write_atomic(&dir.join("config.json"), format!("{resolved}\n").as_bytes())?;
        if config.output.svg {
            let overlays = config
                .output
                .overlays
                .iter()
                .map(|c| c.evaluate(&checkpoints))
                .collect::<Result<Vec<_>>>()?;
            let title = config.name.clone().unwrap_or_else(|| prepared.algorithm().to_string());
            write_atomic(&dir.join("chart.svg"), render_chart(&title, Some(&summary), &overlays).as_bytes())?;
        }
    }
    Ok(Experiment { checkpoints, series, summary, traces })
}
