//! Check records, suite reports and their table, CSV and markdown renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// How a measured value is compared to its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

impl Comparison {
    pub fn holds(self, value: f64, tolerance: f64) -> bool {
        match self {
            Self::AtMost => value <= tolerance,
            Self::Below => value < tolerance,
            Self::AtLeast => value >= tolerance,
            Self::Above => value > tolerance,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::AtMost => "<=",
            Self::Below => "<",
            Self::AtLeast => ">=",
            Self::Above => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// `suite.name`.
    pub id: String,
    /// `None` when the measurement is not a finite number.
    pub value: Option<f64>,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub pass: bool,
    /// Condition or claim the check operationalises, e.g. `(R2)`.
    pub anchor: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(id: &str, value: f64, comparison: Comparison, tolerance: f64, anchor: &str) -> Self {
        let pass = value.is_finite() && comparison.holds(value, tolerance);
        Self {
            id: id.to_string(),
            value: value.is_finite().then_some(value),
            comparison,
            tolerance,
            pass,
            anchor: anchor.to_string(),
            detail: String::new(),
        }
    }

    /// A check whose outcome is a predicate; the value is 1 on success.
    pub fn flag(id: &str, ok: bool, anchor: &str) -> Self {
        Self::new(id, if ok { 1.0 } else { 0.0 }, Comparison::AtLeast, 1.0, anchor)
    }

    /// The computation itself failed.
    pub fn error(id: &str, anchor: &str, message: impl Into<String>) -> Self {
        Self {
            detail: message.into(),
            ..Self::new(id, f64::NAN, Comparison::AtMost, 0.0, anchor)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn suite(&self) -> &str {
        self.id.split('.').next().unwrap_or(&self.id)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Hex SHA-256 of the compact config JSON.
    pub config_fingerprint: String,
    pub seed: u64,
}

impl SuiteReport {
    pub fn new(suite: &str, checks: Vec<Check>, config_fingerprint: String, seed: u64) -> Self {
        Self {
            suite: suite.to_string(),
            pass: checks.iter().all(|c| c.pass),
            checks,
            config_fingerprint,
            seed,
        }
    }

    /// Concatenate reports into one (used for `all`).
    pub fn merge(suite: &str, parts: Vec<SuiteReport>, config_fingerprint: String, seed: u64) -> Self {
        let checks = parts.into_iter().flat_map(|r| r.checks).collect();
        Self::new(suite, checks, config_fingerprint, seed)
    }

    /// `pass` agrees with the checks.
    pub fn is_consistent(&self) -> bool {
        self.pass == self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {}  seed {}  config {}",
            self.suite,
            self.seed,
            &self.config_fingerprint[..self.config_fingerprint.len().min(12)]
        );
        let _ = writeln!(out, "{:<width$}  {:>14}  {:>2}  {:>10}  {:<4}  anchor", "check", "value", "", "tolerance", "");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<width$}  {:>14}  {:>2}  {:>10.3e}  {:<4}  {}",
                c.id,
                format_value(c.value),
                c.comparison.symbol(),
                c.tolerance,
                if c.pass { "PASS" } else { "FAIL" },
                c.anchor
            );
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        let _ = writeln!(
            out,
            "{}: {} checks, {} failed",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.len(),
            failed
        );
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,id,value,comparison,tolerance,pass,anchor\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{},{:e},{},\"{}\"",
                self.suite,
                c.id,
                c.value.map_or("NaN".to_string(), |v| format!("{v:e}")),
                c.comparison.symbol(),
                c.tolerance,
                c.pass,
                c.anchor.replace('"', "'")
            );
        }
        out
    }
}

fn format_value(v: Option<f64>) -> String {
    match v {
        Some(v) if v == 0.0 || (1e-3..1e5).contains(&v.abs()) => format!("{v:.6}"),
        Some(v) => format!("{v:.6e}"),
        None => "NaN".into(),
    }
}

/// Outcome of merging report files.
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub markdown: String,
    pub duplicates: usize,
    pub pass: bool,
}

/// Markdown summary: one table per suite, a table per anchor, then a
/// JSON pass matrix. Exact duplicate reports are counted once.
pub fn aggregate(reports: &[SuiteReport]) -> Aggregate {
    let mut unique: Vec<&SuiteReport> = Vec::new();
    let mut duplicates = 0;
    for r in reports {
        if unique.contains(&r) {
            duplicates += 1;
        } else {
            unique.push(r);
        }
    }

    // suite -> checks, grouping `all` reports by the id prefix
    let mut suites: BTreeMap<String, Vec<&Check>> = BTreeMap::new();
    for r in &unique {
        for c in &r.checks {
            let key = if r.suite == "all" { c.suite().to_string() } else { r.suite.clone() };
            suites.entry(key).or_default().push(c);
        }
    }

    let mut md = String::from("# Verification summary\n\n");
    let fingerprints: Vec<String> = unique
        .iter()
        .map(|r| format!("`{}` (seed {})", &r.config_fingerprint[..r.config_fingerprint.len().min(12)], r.seed))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let _ = writeln!(md, "Configurations: {}\n", fingerprints.join(", "));
    for (suite, checks) in &suites {
        let _ = writeln!(md, "## {suite}\n");
        md.push_str("| check | value | test | tolerance | result | anchor |\n|---|---|---|---|---|---|\n");
        for c in checks {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {:.3e} | {} | {} |",
                c.id,
                format_value(c.value),
                c.comparison.symbol(),
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" },
                c.anchor
            );
        }
        md.push('\n');
    }

    let mut anchors: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for c in suites.values().flatten() {
        let e = anchors.entry(c.anchor.as_str()).or_default();
        e.0 += 1;
        e.1 += c.pass as usize;
    }
    md.push_str("## Conditions\n\n| anchor | checks | passed | result |\n|---|---|---|---|\n");
    for (a, (n, ok)) in &anchors {
        let _ = writeln!(md, "| {a} | {n} | {ok} | {} |", if n == ok { "pass" } else { "FAIL" });
    }

    let matrix: BTreeMap<&str, BTreeMap<&str, bool>> = suites
        .iter()
        .map(|(s, cs)| (s.as_str(), cs.iter().map(|c| (c.id.as_str(), c.pass)).collect()))
        .collect();
    let pass = suites.values().flatten().all(|c| c.pass);
    md.push_str("\n## Pass matrix\n\n```json\n");
    md.push_str(&serde_json::to_string_pretty(&matrix).expect("matrix serialises"));
    md.push_str("\n```\n");
    let _ = writeln!(md, "\nOverall: {}", if pass { "PASS" } else { "FAIL" });
    Aggregate {
        markdown: md,
        duplicates,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SuiteReport {
        SuiteReport::new(
            "metric",
            vec![
                Check::new("metric.a", 1e-15, Comparison::AtMost, 1e-12, "(R3)"),
                Check::new("metric.b", 0.5, Comparison::Above, 0.0, "(R2)"),
            ],
            "ab".repeat(32),
            7,
        )
    }

    #[test]
    fn overall_pass_tracks_checks() {
        let mut r = sample();
        assert!(r.pass && r.is_consistent());
        r.checks.push(Check::new("metric.c", f64::NAN, Comparison::AtMost, 1.0, "(R1)"));
        assert!(!r.is_consistent());
        let r = SuiteReport::new("metric", r.checks, r.config_fingerprint, 7);
        assert!(!r.pass);
    }

    #[test]
    fn report_json_round_trip() {
        let r = SuiteReport::new(
            "x",
            vec![Check::new("x.nan", f64::INFINITY, Comparison::AtMost, 1.0, "(G4)")],
            "00".into(),
            1,
        );
        let back: SuiteReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(!back.pass);
    }

    #[test]
    fn aggregation_is_idempotent() {
        let once = aggregate(&[sample()]);
        let twice = aggregate(&[sample(), sample()]);
        assert_eq!(once.markdown, twice.markdown);
        assert_eq!((once.duplicates, twice.duplicates), (0, 1));
        assert!(once.markdown.contains("| (R2) | 1 | 1 | pass |"));
    }
}
