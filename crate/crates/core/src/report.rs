//! Verification records and their text / JSON serializations.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Version of the structured report layout. Bump on any incompatible change.
pub const SCHEMA_VERSION: u32 = 1;

/// Echo of the scenario that produced a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub bundle: String,
    pub q: f64,
    pub samples: usize,
    pub probes: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

/// Pass thresholds; all residuals are scale-relative (see [`relative`]).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Pure linear algebra at a point.
    pub algebra: f64,
    /// sl(2) commutators and `𝓡(ω_I) = Ω`.
    pub sl2: f64,
    /// Bicomplex identities on polynomial fields.
    pub bicomplex: f64,
    /// Identities involving second derivatives of Ψ or log Ψ.
    pub second_order: f64,
    /// Scale-relative floor for positivity margins.
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { algebra: 1e-10, sl2: 1e-12, bicomplex: 1e-9, second_order: 1e-8, positivity: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub anchor: String,
    pub points: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    /// Smallest positivity margin, for records that certify a strict inequality.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_margin: Option<f64>,
    pub pass: bool,
}

impl Record {
    /// Passes iff `max_residual ≤ tolerance` (NaN fails).
    pub fn residual(id: &str, anchor: &str, points: usize, max_residual: f64, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            anchor: anchor.into(),
            points,
            max_residual,
            tolerance,
            min_margin: None,
            pass: max_residual <= tolerance,
        }
    }

    /// Passes iff the residual is small and every margin is strictly positive.
    pub fn with_margin(mut self, min_margin: f64) -> Self {
        self.min_margin = Some(min_margin);
        self.pass = self.pass && min_margin > 0.0;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigEcho>,
    pub records: Vec<Record>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl VerificationReport {
    pub fn new(suite: &str, records: Vec<Record>) -> Self {
        let pass = records.iter().all(|r| r.pass);
        Self { schema_version: SCHEMA_VERSION, suite: suite.into(), config: None, records, pass, wall_time_seconds: None }
    }

    pub fn with_config(mut self, config: ConfigEcho) -> Self {
        self.config = Some(config);
        self
    }

    pub fn merge(suite: &str, parts: Vec<VerificationReport>) -> Self {
        Self::new(suite, parts.into_iter().flat_map(|r| r.records).collect())
    }

    pub fn record(&self, id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite: {}", self.suite);
        if let Some(c) = &self.config {
            let _ = writeln!(
                out,
                "config: n={} bundle={} q={} samples={} probes={} seed={}",
                c.n, c.bundle, c.q, c.samples, c.probes, c.seed
            );
        }
        let w = self.records.iter().map(|r| r.id.len()).max().unwrap_or(8).max(8);
        let a = self.records.iter().map(|r| display_width(&r.anchor)).max().unwrap_or(6).max(6);
        let _ = writeln!(out, "{:<w$}  {:<a$}  {:>6}  {:>10}  {:>8}  result", "identity", "anchor", "points", "residual", "tol");
        for r in &self.records {
            let anchor = format!("{}{}", r.anchor, " ".repeat(a - display_width(&r.anchor)));
            let mut status = if r.pass { "PASS".to_string() } else { "FAIL".to_string() };
            if let Some(m) = r.min_margin {
                let _ = write!(status, " margin={m:.3e}");
            }
            let _ = writeln!(
                out,
                "{:<w$}  {}  {:>6}  {:>10.3e}  {:>8.1e}  {}",
                r.id, anchor, r.points, r.max_residual, r.tolerance, status
            );
        }
        let _ = writeln!(out, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
        if let Some(t) = self.wall_time_seconds {
            let _ = writeln!(out, "wall time: {t:.3}s");
        }
        out
    }
}

/// Terminal columns of a string, ignoring combining diacritics.
fn display_width(s: &str) -> usize {
    s.chars().filter(|c| !('\u{0300}'..='\u{036f}').contains(c)).count()
}

/// `|residual| / (1 + scale)`, the convention for every residual in a report.
pub fn relative(residual: f64, scale: f64) -> f64 {
    residual / (1.0 + scale.abs())
}

/// Max-reduction that maps NaN and `+∞` to `f64::MAX`, so broken evaluations
/// fail and still serialize as JSON numbers.
pub fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0f64, |m, v| if v.is_finite() { m.max(v) } else { f64::MAX })
}

/// Min-reduction for margins; non-finite values become `−f64::MAX`.
pub fn least(values: impl IntoIterator<Item = f64>) -> f64 {
    let m = values.into_iter().fold(f64::INFINITY, |m, v| if v.is_finite() { m.min(v) } else { -f64::MAX });
    if m.is_finite() {
        m
    } else {
        f64::MAX
    }
}
