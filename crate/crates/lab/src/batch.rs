//! Concurrent execution of a catalog and the batch summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Scenario;
use crate::runner::{run_scenario, RunError, RunReport};

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub wall_time_s: f64,
    pub scenarios: Vec<RunReport>,
}

/// Runs every scenario on a pool of `workers` threads (0 picks the number of
/// cores). Reports come back in catalog order.
pub fn run_batch(scenarios: &[Scenario], out_root: &Path, workers: usize) -> Result<Summary, RunError> {
    let start = std::time::Instant::now();
    fs::create_dir_all(out_root)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Io(std::io::Error::other(e)))?;
    let scenarios: Vec<RunReport> = pool.install(|| scenarios.par_iter().map(|s| run_scenario(s, out_root)).collect());
    let failed = scenarios.iter().filter(|r| !r.passed).count();
    Ok(Summary {
        passed: failed == 0,
        total: scenarios.len(),
        failed,
        wall_time_s: start.elapsed().as_secs_f64(),
        scenarios,
    })
}

pub fn write_summary(summary: &Summary, out_root: &Path) -> Result<PathBuf, RunError> {
    let path = out_root.join(SUMMARY_FILE);
    fs::write(&path, serde_json::to_string_pretty(summary)?)?;
    Ok(path)
}

/// One row per check, grouped by scenario.
pub fn table(summary: &Summary) -> String {
    let mut rows: Vec<[String; 5]> = Vec::new();
    for r in &summary.scenarios {
        let verdict = |pass: bool| if pass { "PASS" } else { "FAIL" }.to_string();
        if let Some(e) = &r.error {
            rows.push([
                r.scenario.clone(),
                "-".into(),
                "error".into(),
                e.clone(),
                verdict(false),
            ]);
        }
        for a in &r.analyses {
            for c in &a.checks {
                rows.push([
                    r.scenario.clone(),
                    a.analysis.clone(),
                    c.name.clone(),
                    format!("{:.4e} {}", c.measured, c.requirement),
                    verdict(c.pass),
                ]);
            }
        }
        if r.error.is_none() && r.analyses.is_empty() {
            rows.push([
                r.scenario.clone(),
                "-".into(),
                "-".into(),
                "no analyses".into(),
                verdict(r.passed),
            ]);
        }
    }
    let header = ["scenario", "analysis", "check", "measured", "result"];
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut s = String::new();
    let mut line = |cells: [&str; 5]| {
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            let sep = if i + 1 == cells.len() { "\n" } else { "  " };
            let _ = write!(s, "{cell:<w$}{sep}");
        }
    };
    line(header);
    for row in &rows {
        line([&row[0], &row[1], &row[2], &row[3], &row[4]]);
    }
    let _ = writeln!(
        s,
        "{} of {} scenarios passed in {:.1}s",
        summary.total - summary.failed,
        summary.total,
        summary.wall_time_s
    );
    s
}
