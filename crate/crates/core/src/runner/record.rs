use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::numerics::stats::Estimate;
use crate::sampling::Seed;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Monte Carlo rows pass when the estimate is within this many standard errors.
pub const Z_GATE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    MonteCarlo,
    Quadrature,
    Bound,
    Construction,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::MonteCarlo => "monte-carlo",
            Method::Quadrature => "quadrature",
            Method::Bound => "bound",
            Method::Construction => "construction",
        }
    }
}

/// One computed number and, when there is something to compare against, the
/// outcome of that comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub quantity: String,
    /// Acceptance criterion number, for rows produced by `verify`.
    pub criterion: Option<u32>,
    /// `name=value` pairs joined by `;`.
    pub params: String,
    pub method: Method,
    pub value: f64,
    pub std_error: Option<f64>,
    pub ci95: Option<[f64; 2]>,
    pub n_samples: Option<u64>,
    pub reference: Option<f64>,
    pub z_score: Option<f64>,
    /// Allowed `|value - reference|`; absent for z-gated rows.
    pub tolerance: Option<f64>,
    /// Informational rows are not gated and always pass.
    pub gated: bool,
    pub pass: bool,
    pub note: String,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl ResultRecord {
    fn base(quantity: &str, params: &str, method: Method, value: f64) -> Self {
        ResultRecord {
            quantity: quantity.to_string(),
            criterion: None,
            params: params.to_string(),
            method,
            value,
            std_error: None,
            ci95: None,
            n_samples: None,
            reference: None,
            z_score: None,
            tolerance: None,
            gated: false,
            pass: true,
            note: String::new(),
        }
    }

    /// A value with nothing to check it against.
    pub fn info(quantity: &str, params: &str, method: Method, value: f64) -> Self {
        Self::base(quantity, params, method, value)
    }

    /// A Monte Carlo estimate with no reference value.
    pub fn estimate(quantity: &str, params: &str, est: &Estimate) -> Self {
        let mut r = Self::base(quantity, params, Method::MonteCarlo, est.mean);
        r.std_error = Some(est.std_error);
        r.ci95 = Some([est.ci95_low, est.ci95_high]);
        r.n_samples = Some(est.n_samples);
        r
    }

    /// A Monte Carlo estimate gated at `|z| <= Z_GATE` against `reference`.
    pub fn z_gated(quantity: &str, params: &str, est: &Estimate, reference: f64) -> Self {
        let mut r = Self::estimate(quantity, params, est);
        let z = est.z_score(reference);
        r.reference = Some(reference);
        r.z_score = finite(z);
        r.gated = true;
        r.pass = z.abs() <= Z_GATE;
        r
    }

    /// Gated at `|value - reference| <= tolerance`.
    pub fn within(quantity: &str, params: &str, method: Method, value: f64, reference: f64, tolerance: f64) -> Self {
        let mut r = Self::base(quantity, params, method, value);
        r.reference = Some(reference);
        r.tolerance = Some(tolerance);
        r.gated = true;
        r.pass = (value - reference).abs() <= tolerance;
        r
    }

    /// Gated at `lo <= value <= hi`, stored as a midpoint and half-width.
    pub fn in_interval(quantity: &str, params: &str, method: Method, value: f64, lo: f64, hi: f64) -> Self {
        let mut r = Self::within(quantity, params, method, value, 0.5 * (lo + hi), 0.5 * (hi - lo));
        r.pass = lo <= value && value <= hi;
        r.note = format!("interval [{lo}, {hi}]");
        r
    }

    /// Attaches Monte Carlo spread to a tolerance-gated row.
    pub fn with_spread(mut self, est: &Estimate) -> Self {
        self.std_error = Some(est.std_error);
        self.ci95 = Some([est.ci95_low, est.ci95_high]);
        self.n_samples = Some(est.n_samples);
        self
    }

    pub fn criterion(mut self, c: u32) -> Self {
        self.criterion = Some(c);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if self.note.is_empty() {
            self.note = note;
        } else {
            self.note = format!("{}; {note}", self.note);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub artifact_version: String,
    pub command: String,
    pub quantity: Option<String>,
    pub seed: Seed,
    pub samples: u64,
    pub workers: usize,
    pub records: Vec<ResultRecord>,
}

impl Report {
    /// Whether every gated row passed.
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResultRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{}", CSV_COLUMNS.join(","))?;
        for r in &self.records {
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            let fields = [
                csv_field(&r.quantity),
                r.criterion.map(|c| c.to_string()).unwrap_or_default(),
                csv_field(&r.params),
                r.method.name().to_string(),
                r.value.to_string(),
                opt(r.std_error),
                opt(r.ci95.map(|c| c[0])),
                opt(r.ci95.map(|c| c[1])),
                r.n_samples.map(|n| n.to_string()).unwrap_or_default(),
                opt(r.reference),
                opt(r.z_score),
                opt(r.tolerance),
                r.gated.to_string(),
                r.pass.to_string(),
                csv_field(&r.note),
            ];
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

pub const CSV_COLUMNS: [&str; 15] = [
    "quantity",
    "criterion",
    "params",
    "method",
    "value",
    "std_error",
    "ci95_low",
    "ci95_high",
    "n_samples",
    "reference",
    "z_score",
    "tolerance",
    "gated",
    "pass",
    "note",
];

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(mean: f64, se: f64) -> Estimate {
        Estimate::new(mean, se, 1000, Seed(1))
    }

    #[test]
    fn z_gate() {
        assert!(ResultRecord::z_gated("q", "", &est(0.26, 0.01), 0.25).pass);
        let r = ResultRecord::z_gated("q", "", &est(0.30, 0.01), 0.25);
        assert!(!r.pass);
        assert!((r.z_score.unwrap() - 5.0).abs() < 1e-9);
        // zero spread and an exact hit
        assert!(ResultRecord::z_gated("q", "", &est(0.0, 0.0), 0.0).pass);
        let r = ResultRecord::z_gated("q", "", &est(0.1, 0.0), 0.0);
        assert!(!r.pass && r.z_score.is_none());
    }

    #[test]
    fn interval_and_tolerance() {
        assert!(ResultRecord::in_interval("q", "", Method::Bound, 3.3, 3.15, 3.4).pass);
        assert!(!ResultRecord::in_interval("q", "", Method::Bound, 3.5, 3.15, 3.4).pass);
        assert!(ResultRecord::within("q", "", Method::ClosedForm, 0.25, 0.25, 0.0).pass);
        assert!(!ResultRecord::within("q", "", Method::ClosedForm, 0.2501, 0.25, 1e-6).pass);
        assert!(ResultRecord::info("q", "", Method::Quadrature, 7.0).pass);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("k=3;n=4"), "k=3;n=4");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn json_round_trip() {
        let report = Report {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION.to_string(),
            command: "estimate".into(),
            quantity: Some("p-triangle".into()),
            seed: Seed(7),
            samples: 1000,
            workers: 1,
            records: vec![ResultRecord::z_gated("p-triangle", "", &est(0.25, 0.01), 0.25).criterion(1)],
        };
        let back = Report::from_json(&report.to_json()).unwrap();
        assert_eq!(back, report);
        assert!(Report::from_json(r#"{"schema_version":1,"bogus":2}"#).is_err());
    }
}
