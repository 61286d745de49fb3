//! CSV rendering and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use cbm_core::bounds::BoundCurve;
use cbm_core::Trace;

use crate::error::{HarnessError, Result};
use crate::summary::SummaryTable;

pub const TRACE_HEADER: &str = "t,context,action,query,budget,budget_used,regret_inst,regret_cum";
pub const SUMMARY_HEADER: &str = "t,regret_mean,regret_std,regret_min,regret_max,budget_used_mean";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trace_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in trace.rows() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t,
            r.context,
            r.action,
            r.queries,
            fmt_float(r.budget),
            fmt_float(r.budget_used),
            fmt_float(r.regret_inst),
            fmt_float(r.regret_cum)
        );
    }
    out
}

pub fn summary_csv(table: &SummaryTable) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.t,
            fmt_float(r.regret_mean),
            fmt_float(r.regret_std),
            fmt_float(r.regret_min),
            fmt_float(r.regret_max),
            fmt_float(r.budget_used_mean)
        );
    }
    out
}

pub fn curve_csv(curve: &BoundCurve<f64>) -> String {
    let mut out = String::from("t,value\n");
    for &(t, v) in &curve.points {
        let _ = writeln!(out, "{t},{}", fmt_float(v));
    }
    out
}

/// Quotes a CSV field when it holds a separator, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Keeps file names portable: anything outside `[A-Za-z0-9._-]` becomes `_`.
pub fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' }).collect()
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    ensure_dir(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| HarnessError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| HarnessError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| HarnessError::io(path, e))?;
    tmp.persist(path).map_err(|e| HarnessError::io(path, e.error))?;
    Ok(())
}
