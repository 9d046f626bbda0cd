//! Experiment reports: summary metrics, threshold checks and raw tables.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// A declared threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within { target: f64, tol: f64 },
}

impl Bound {
    pub fn holds(&self, value: f64) -> bool {
        match *self {
            Bound::AtMost(b) => value <= b,
            Bound::AtLeast(b) => value >= b,
            Bound::Within { target, tol } => (value - target).abs() <= tol,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let small = |v: f64| v != 0.0 && v.abs() < 1e-3;
        match *self {
            Bound::AtMost(b) if small(b) => write!(f, "<= {b:.1e}"),
            Bound::AtMost(b) => write!(f, "<= {b:.6}"),
            Bound::AtLeast(b) => write!(f, ">= {b:.6}"),
            Bound::Within { target, tol } => write!(f, "{target:.4} ± {tol:.4}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub passed: bool,
    /// Informational checks are reported but do not decide the verdict.
    pub gated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub stderr: Option<f64>,
}

/// Raw per-task or per-point data with fixed columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub id: String,
    pub seed: u64,
    pub samples: usize,
    pub params: Vec<(String, String)>,
    pub metrics: Vec<Metric>,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(id: &str, seed: u64, samples: usize) -> Self {
        Self { id: id.into(), seed, samples, ..Self::default() }
    }

    pub fn param(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.params.push((key.into(), format!("{value}")));
        self
    }

    pub fn metric(&mut self, name: &str, value: f64) -> &mut Self {
        self.metrics.push(Metric { name: name.into(), value, stderr: None });
        self
    }

    pub fn metric_se(&mut self, name: &str, value: f64, stderr: f64) -> &mut Self {
        let stderr = stderr.is_finite().then_some(stderr);
        self.metrics.push(Metric { name: name.into(), value, stderr });
        self
    }

    /// Record a gated check.
    pub fn check(&mut self, name: &str, value: f64, bound: Bound) -> bool {
        let passed = bound.holds(value);
        self.checks.push(Check { name: name.into(), value, bound, passed, gated: true });
        passed
    }

    /// Record a check that is reported but not gated.
    pub fn observe(&mut self, name: &str, value: f64, bound: Bound) -> bool {
        let passed = bound.holds(value);
        self.checks.push(Check { name: name.into(), value, bound, passed, gated: false });
        passed
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn table(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn get_metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn get_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// All gated checks hold (vacuously true without checks).
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.gated).all(|c| c.passed)
    }

    /// Merge another report's metrics, checks and tables under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: ExperimentReport) {
        let name = |n: &str| if prefix.is_empty() { n.to_string() } else { format!("{prefix}.{n}") };
        for m in other.metrics {
            self.metrics.push(Metric { name: name(&m.name), ..m });
        }
        for c in other.checks {
            self.checks.push(Check { name: name(&c.name), ..c });
        }
        for t in other.tables {
            self.tables.push(Table { name: name(&t.name), ..t });
        }
        self.notes.extend(other.notes);
        self.samples += other.samples;
    }

    /// One-line verdict.
    pub fn verdict(&self) -> String {
        let failed: Vec<&str> = self.checks.iter().filter(|c| c.gated && !c.passed).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            format!("{}: PASS ({} checks)", self.id, self.checks.iter().filter(|c| c.gated).count())
        } else {
            format!("{}: FAIL ({})", self.id, failed.join(", "))
        }
    }
}
