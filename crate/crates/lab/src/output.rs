use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rmt_core::report::{Bound, ExperimentReport, Table};
use serde::Serialize;

use crate::config::ExperimentConfig;

pub fn header_line(cfg: &ExperimentConfig) -> String {
    format!("# config_hash={}, seed={}", cfg.hash(), cfg.seed)
}

/// CSV text of one table, with the provenance header line first.
pub fn table_csv(cfg: &ExperimentConfig, table: &Table) -> String {
    let mut s = header_line(cfg);
    s.push('\n');
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct CheckOut<'a> {
    name: &'a str,
    value: f64,
    bound: String,
    passed: bool,
    gated: bool,
}

#[derive(Serialize)]
struct MetricOut<'a> {
    name: &'a str,
    value: f64,
    stderr: Option<f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    config_hash: String,
    seed: u64,
    experiment: &'a str,
    verdict: String,
    passed: bool,
    samples: usize,
    threads: usize,
    wall_clock_s: f64,
    params: Vec<(&'a str, &'a str)>,
    metrics: Vec<MetricOut<'a>>,
    checks: Vec<CheckOut<'a>>,
    notes: &'a [String],
    tables: Vec<String>,
    config: &'a ExperimentConfig,
}

fn json_number(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn bound_text(b: &Bound) -> String {
    b.to_string()
}

fn table_file(report: &ExperimentReport, table: &Table) -> String {
    format!("{}_{}.csv", report.id, table.name.replace('.', "_"))
}

pub fn summary_json(cfg: &ExperimentConfig, report: &ExperimentReport, threads: usize, wall_clock_s: f64) -> String {
    let summary = Summary {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        experiment: &report.id,
        verdict: report.verdict(),
        passed: report.passed(),
        samples: report.samples,
        threads,
        wall_clock_s,
        params: report.params.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect(),
        metrics: report
            .metrics
            .iter()
            .map(|m| MetricOut { name: &m.name, value: json_number(m.value).unwrap_or(f64::NAN), stderr: m.stderr.and_then(json_number) })
            .collect(),
        checks: report
            .checks
            .iter()
            .map(|c| CheckOut { name: &c.name, value: c.value, bound: bound_text(&c.bound), passed: c.passed, gated: c.gated })
            .collect(),
        notes: &report.notes,
        tables: report.tables.iter().map(|t| table_file(report, t)).collect(),
        config: cfg,
    };
    // Non-finite numbers serialize as null.
    serde_json::to_string_pretty(&summary).expect("summary serializes")
}

/// Write `<id>.json` and one CSV per table into `dir`.
pub fn write_report(
    dir: &Path,
    cfg: &ExperimentConfig,
    report: &ExperimentReport,
    threads: usize,
    wall_clock_s: f64,
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in &report.tables {
        let path = dir.join(table_file(report, t));
        std::fs::write(&path, table_csv(cfg, t))?;
        written.push(path);
    }
    let path = dir.join(format!("{}.json", report.id));
    std::fs::write(&path, summary_json(cfg, report, threads, wall_clock_s))?;
    written.push(path);
    Ok(written)
}

/// Human-readable check listing for the terminal.
pub fn check_lines(report: &ExperimentReport) -> String {
    let mut s = String::new();
    for c in &report.checks {
        let tag = match (c.gated, c.passed) {
            (true, true) => "pass",
            (true, false) => "FAIL",
            (false, true) => "info",
            (false, false) => "info!",
        };
        let _ = writeln!(s, "  [{tag:5}] {} = {:.6} ({})", c.name, c.value, c.bound);
    }
    s
}
