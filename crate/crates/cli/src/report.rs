//! Tables, checks and their CSV/JSON renderings.

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Tolerances;

/// C-style `%.12e`: twelve mantissa digits, signed exponent of at least two digits.
pub fn sci(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    format!("{mant}e{sign}{digits:0>2}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => sci(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem, e.g. `fidelity`.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(name: impl Into<String>, header: Vec<String>) -> Self {
        Self { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| Cell::Num(v)).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Column-oriented JSON: `{"columns": [...], "rows": [[...], ...]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "columns": self.header,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Residual-type check: `value ≤ bound`.
    AtMost,
    /// Sensitivity control or fidelity: `value ≥ bound`.
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Profile {
    Default,
    Strict,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Default => "default",
            Profile::Strict => "strict",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub kind: Bound,
    pub passed: bool,
}

/// Collects checks for one suite, applying overrides and the profile.
pub struct Checker<'a> {
    suite: String,
    overrides: &'a Tolerances,
    profile: Profile,
    pub checks: Vec<Check>,
}

impl<'a> Checker<'a> {
    pub fn new(suite: &str, overrides: &'a Tolerances, profile: Profile) -> Self {
        Self { suite: suite.into(), overrides, profile, checks: Vec::new() }
    }

    fn record(&mut self, name: &str, value: f64, default: f64, kind: Bound) {
        let mut bound = self.overrides.get(name).copied().unwrap_or(default);
        // Strict tightens residual bounds by a decade; controls are unchanged.
        if self.profile == Profile::Strict && kind == Bound::AtMost {
            bound *= 0.1;
        }
        let passed = match kind {
            Bound::AtMost => value <= bound,
            Bound::AtLeast => value >= bound,
        };
        self.checks.push(Check { suite: self.suite.clone(), name: name.into(), value, bound, kind, passed });
    }

    pub fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.record(name, value, bound, Bound::AtMost);
    }

    pub fn at_least(&mut self, name: &str, value: f64, bound: f64) {
        self.record(name, value, bound, Bound::AtLeast);
    }

    /// Pass/fail fact with no numeric margin (recorded as 1/0 against 1).
    pub fn holds(&mut self, name: &str, ok: bool) {
        self.record(name, if ok { 1.0 } else { 0.0 }, 1.0, Bound::AtLeast);
    }
}

pub fn checks_table(checks: &[Check]) -> Table {
    let mut t = Table::new("checks", &["suite", "check", "value", "bound", "kind", "passed"]);
    for c in checks {
        t.push(vec![
            c.suite.as_str().into(),
            c.name.as_str().into(),
            c.value.into(),
            c.bound.into(),
            match c.kind {
                Bound::AtMost => "at_most",
                Bound::AtLeast => "at_least",
            }
            .into(),
            if c.passed { "true" } else { "false" }.into(),
        ]);
    }
    t
}

/// Everything a scenario produces.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub summary: Value,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(sci(1.0), "1.000000000000e+00");
        assert_eq!(sci(-1.44e-3), "-1.440000000000e-03");
        assert_eq!(sci(6.02e123), "6.020000000000e+123");
        assert_eq!(sci(0.0), "0.000000000000e+00");
    }

    #[test]
    fn strict_profile_tightens_residuals_only() {
        let none = Tolerances::new();
        let mut c = Checker::new("s", &none, Profile::Strict);
        c.at_most("r", 5e-9, 1e-8);
        c.at_least("f", 0.9995, 0.999);
        assert!(!c.checks[0].passed);
        assert!(c.checks[1].passed);
        let mut over = Tolerances::new();
        over.insert("r".into(), 1e-6);
        let mut c = Checker::new("s", &over, Profile::Default);
        c.at_most("r", 5e-7, 1e-8);
        assert!(c.checks[0].passed);
    }

    #[test]
    fn csv_quotes_text() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec!["p,q".into(), 2usize.into()]);
        assert_eq!(t.to_csv(), "a,b\n\"p,q\",2\n");
    }
}
