//! Serialization of run reports as JSON, CSV or an aligned text table.
//!
//! Floats are written in shortest round-trip form and every map is ordered,
//! so the same report always serializes to the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::contrast::{ContrastNode, Proposition, PropositionStatus};
use crate::hv::CheckReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn name(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub state: [f64; 3],
    pub model: String,
    pub grid: [usize; 2],
    pub samples: u64,
    pub seed: u64,
    pub format: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bounds {
    pub quantum: f64,
    pub hv: f64,
}

/// Standard error of the hidden-variable contrast and its 2σ/4σ half-widths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorBands {
    pub std_error: f64,
    pub two_sigma: f64,
    pub four_sigma: f64,
}

impl ErrorBands {
    pub fn new(std_error: f64) -> Self {
        Self {
            std_error,
            two_sigma: 2.0 * std_error,
            four_sigma: 4.0 * std_error,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Results {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_state_dependence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantum_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hv_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Bounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bloch_norm_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proposition_flags: Option<BTreeMap<Proposition, PropositionStatus>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub errors_sigma: Option<ErrorBands>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contradiction: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckReport>,
    /// Per-direction rows; CSV only.
    #[serde(skip)]
    pub nodes: Vec<ContrastNode>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub seed: u64,
    pub rng_name: String,
    pub grid: [usize; 2],
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: ConfigEcho,
    pub results: Results,
    pub metadata: Metadata,
}

pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Csv => emit_csv(report),
        Format::Text => emit_text(report).into_bytes(),
    }
}

/// `(key, value)` pairs of the summary, in a fixed order.
fn summary_rows(report: &Report) -> Vec<(String, String)> {
    let r = &report.results;
    let mut rows = vec![("command".to_string(), report.command.clone())];
    let mut push = |k: &str, v: String| rows.push((k.to_string(), v));
    if let Some(m) = &r.model {
        push("model", m.clone());
    }
    if let Some(v) = r.quantum_value {
        push("quantum_value", v.to_string());
    }
    if let Some(b) = r.bounds {
        push("quantum_bound", b.quantum.to_string());
    }
    if let Some(v) = r.hv_value {
        push("hv_value", v.to_string());
    }
    if let Some(b) = r.bounds {
        push("hv_bound", b.hv.to_string());
    }
    if let Some(e) = r.errors_sigma {
        push("hv_std_error", e.std_error.to_string());
        push("hv_four_sigma", e.four_sigma.to_string());
    }
    if let Some(v) = r.bloch_norm_sq {
        push("bloch_norm_sq", v.to_string());
    }
    if let Some(v) = r.gap_ratio {
        push("gap_ratio", v.to_string());
    }
    if let Some(flags) = &r.proposition_flags {
        for (p, s) in flags {
            push(&format!("flag_{}", enum_name(p)), enum_name(s));
        }
    }
    if let Some(v) = r.contradiction {
        push("contradiction", v.to_string());
    }
    if let Some(v) = &r.verdict {
        push("verdict", v.clone());
    }
    if let Some(v) = r.passed {
        push("passed", v.to_string());
    }
    for w in &r.warnings {
        push("warning", w.clone());
    }
    rows.push(("seed".into(), report.metadata.seed.to_string()));
    rows.push((
        "grid".into(),
        format!("{},{}", report.metadata.grid[0], report.metadata.grid[1]),
    ));
    rows
}

fn enum_name<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

const CSV_HEADER: [&str; 10] = [
    "kind",
    "name",
    "value",
    "index",
    "theta",
    "phi",
    "weight",
    "quantum",
    "hv_mean",
    "hv_std_error",
];

fn emit_csv(report: &Report) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    let blank = String::new;
    for (k, v) in summary_rows(report) {
        let mut row = vec!["summary".to_string(), k, v];
        row.resize(CSV_HEADER.len(), blank());
        writer.write_record(&row).expect("in-memory write");
    }
    for c in &report.results.checks {
        let row = [
            "check".to_string(),
            c.check.clone(),
            if c.passed { "pass" } else { "fail" }.to_string(),
        ];
        let mut row = row.to_vec();
        row.resize(CSV_HEADER.len(), blank());
        writer.write_record(&row).expect("in-memory write");
    }
    for n in &report.results.nodes {
        writer
            .write_record([
                "node".to_string(),
                String::new(),
                String::new(),
                n.index.to_string(),
                n.theta.to_string(),
                n.phi.to_string(),
                n.weight.to_string(),
                n.quantum.to_string(),
                n.hv_mean.to_string(),
                n.hv_std_error.to_string(),
            ])
            .expect("in-memory write");
    }
    writer.into_inner().expect("in-memory flush")
}

fn emit_text(report: &Report) -> String {
    let rows = summary_rows(report);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in &rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    let checks = &report.results.checks;
    if !checks.is_empty() {
        let name_w = checks
            .iter()
            .map(|c| c.check.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<name_w$}  {:<6}  {:>22}  {:>22}  {:>22}  {:>22}",
            "check", "result", "observed", "expected", "deviation", "tolerance"
        );
        for c in checks {
            let _ = writeln!(
                out,
                "{:<name_w$}  {:<6}  {:>22}  {:>22}  {:>22}  {:>22}",
                c.check,
                if c.passed { "pass" } else { "FAIL" },
                table_num(c.observed),
                table_num(c.expected),
                table_num(c.deviation),
                table_num(c.tolerance)
            );
        }
    }
    out
}

/// Compact rendering for the text table; the exact values live in JSON/CSV.
fn table_num(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e9) {
        format!("{x:.6e}")
    } else {
        x.to_string()
    }
}
