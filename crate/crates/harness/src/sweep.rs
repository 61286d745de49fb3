//! Cartesian sweeps over config values addressed by dotted paths.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::output::{csv_field, fmt_float, write_atomic};
use crate::runner::{run_experiment, RunOptions};

/// A base config plus, under `"sweep"`, a map from dotted path to the list of
/// values it takes.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub base: Value,
    pub axes: BTreeMap<String, Vec<Value>>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut base: Value = serde_json::from_str(text).map_err(|e| HarnessError::config(e.to_string()))?;
        let object = base.as_object_mut().ok_or_else(|| HarnessError::config("sweep config must be an object"))?;
        let axes = object.remove("sweep").ok_or_else(|| HarnessError::config("missing \"sweep\" section"))?;
        let axes: BTreeMap<String, Vec<Value>> =
            serde_json::from_value(axes).map_err(|e| HarnessError::config(format!("sweep: {e}")))?;
        if axes.is_empty() || axes.values().any(Vec::is_empty) {
            return Err(HarnessError::config("every sweep axis needs at least one value"));
        }
        Ok(Self { base, axes })
    }

    /// All points in row-major order over the axes sorted by path.
    pub fn points(&self) -> Vec<Vec<(&str, &Value)>> {
        let mut points: Vec<Vec<(&str, &Value)>> = vec![Vec::new()];
        for (path, values) in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push((path.as_str(), v));
                        q
                    })
                })
                .collect();
        }
        points
    }

    pub fn config_at(&self, point: &[(&str, &Value)]) -> Result<ExperimentConfig> {
        let mut value = self.base.clone();
        for (path, v) in point {
            set_path(&mut value, path, (*v).clone())?;
        }
        ExperimentConfig::from_value(value)
    }
}

/// Sets `root.a.b.c = value`, creating intermediate objects as needed.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(HarnessError::config(format!("bad sweep path {path:?}")));
    }
    for (i, part) in parts.iter().enumerate() {
        let object = node
            .as_object_mut()
            .ok_or_else(|| HarnessError::config(format!("sweep path {path:?} crosses a non-object")))?;
        if i + 1 == parts.len() {
            object.insert((*part).to_string(), value);
            return Ok(());
        }
        node = object.entry(*part).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("path has at least one part")
}

/// Runs every point into `out/point_NNNN/` and writes `out/sweep.csv` with
/// the final-round statistics of each point.
pub fn run_sweep(sweep: &SweepConfig, out: &Path, options: &RunOptions) -> Result<()> {
    let points = sweep.points();
    let configs = points.iter().map(|p| sweep.config_at(p)).collect::<Result<Vec<_>>>()?;
    let mut table = String::from("point");
    for path in sweep.axes.keys() {
        table.push(',');
        table.push_str(&csv_field(path));
    }
    table.push_str(",t,regret_mean,regret_std,budget_used_mean\n");
    for (i, (point, config)) in points.iter().zip(&configs).enumerate() {
        let experiment = run_experiment(config, Some(&out.join(format!("point_{i:04}"))), options)?;
        let last = experiment.summary.last().expect("horizon ≥ 1");
        let _ = write!(table, "{i}");
        for (_, v) in point {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = write!(table, ",{}", csv_field(&text));
        }
        let _ = writeln!(
            table,
            ",{},{},{},{}",
            last.t,
            fmt_float(last.regret_mean),
            fmt_float(last.regret_std),
            fmt_float(last.budget_used_mean)
        );
    }
    write_atomic(&out.join("sweep.csv"), table.as_bytes())
}
