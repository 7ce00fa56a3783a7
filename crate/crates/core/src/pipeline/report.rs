use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Pqc,
    Mpd,
    Vdsp,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Pqc => "PQC",
            Method::Mpd => "MPD",
            Method::Vdsp => "VDSP",
        })
    }
}

/// One row of a results table.
///
/// Accuracy and infidelity always come from simulating the synthesized
/// circuit. `wall_time` is the only field that varies between identical runs;
/// clear it to get reproducible report files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub method: Method,
    pub family: String,
    pub n_qubits: usize,
    pub vl: Option<usize>,
    pub mpd_layers: Option<usize>,
    pub accuracy: f64,
    pub infidelity: f64,
    pub depth: usize,
    pub cx_count: usize,
    pub initial_ee: f64,
    /// VDSP only: entropy left after the trained transformation.
    pub reduced_ee: Option<f64>,
    pub final_ee: f64,
    /// Training iterations actually run (PQC and VDSP).
    pub iterations: Option<usize>,
    /// Seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
    pub seed: Option<u64>,
}

/// Gate counts for exact preparation, carried as fixed reference data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactReference {
    pub family: String,
    pub n_qubits: usize,
    pub depth: usize,
    pub cx_count: usize,
    pub initial_ee: f64,
    pub final_ee: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    /// Aligned table.
    Text,
    /// Pretty-printed JSON array.
    Json,
}

const HEADER: [&str; 14] = [
    "Method",
    "Family",
    "#qubits",
    "#VL",
    "#MPD L",
    "Accuracy",
    "Infidelity",
    "Depth",
    "#CX",
    "Initial EE",
    "Reduced EE",
    "Final EE",
    "Seed",
    "Time (s)",
];

/// Render `reports`. The time column is only shown when some report has one.
pub fn emit_report(reports: &[RunReport], format: ReportFormat) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::EmptyReport);
    }
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(reports).map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Text => {
            let timed = reports.iter().any(|r| r.wall_time.is_some());
            let cols = if timed { HEADER.len() } else { HEADER.len() - 1 };
            let rows: Vec<Vec<String>> = reports.iter().map(|r| text_row(r)[..cols].to_vec()).collect();
            Ok(align(&HEADER[..cols], &rows))
        }
    }
}

/// Inverse of [`emit_report`] with [`ReportFormat::Json`].
pub fn parse_report(text: &str) -> Result<Vec<RunReport>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Exact-preparation rows, labeled as reference values.
pub fn emit_references(refs: &[ExactReference]) -> String {
    let header = ["Method", "Family", "#qubits", "Depth", "#CX", "Initial EE", "Final EE"];
    let rows: Vec<Vec<String>> = refs
        .iter()
        .map(|r| {
            vec![
                "Exact".into(),
                r.family.clone(),
                r.n_qubits.to_string(),
                r.depth.to_string(),
                r.cx_count.to_string(),
                format!("{:.6}", r.initial_ee),
                format!("{:.6}", r.final_ee),
            ]
        })
        .collect();
    format!(
        "Exact preparation (fixed reference values, not recomputed)\n{}",
        align(&header, &rows)
    )
}

fn text_row(r: &RunReport) -> Vec<String> {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    vec![
        r.method.to_string(),
        r.family.clone(),
        r.n_qubits.to_string(),
        opt(r.vl.map(|v| v.to_string())),
        opt(r.mpd_layers.map(|v| v.to_string())),
        format!("{:.6}", r.accuracy),
        format!("{:.2e}", r.infidelity),
        r.depth.to_string(),
        r.cx_count.to_string(),
        format!("{:.6}", r.initial_ee),
        opt(r.reduced_ee.map(|v| format!("{v:.6}"))),
        format!("{:.6}", r.final_ee),
        opt(r.seed.map(|v| v.to_string())),
        opt(r.wall_time.map(|v| format!("{v:.2}"))),
    ]
}

fn align(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    let total = width.iter().sum::<usize>() + 2 * (width.len() - 1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}
