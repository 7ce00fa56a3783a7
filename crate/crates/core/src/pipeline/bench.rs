use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{ExactReference, Method, RunReport};
use super::run::{run_baseline_mpd, run_baseline_pqc, run_vdsp};
use crate::error::{Error, Result};
use crate::targets::{Family, TargetSpec};
use crate::train::TrainConfig;

/// The benchmark rows shipped with the crate.
pub const DEFAULT_MANIFEST: &str = include_str!("../../benchmarks/tables.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub table: Vec<BenchTable>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchTable {
    pub name: String,
    pub target: Family,
    pub row: Vec<BenchRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchRow {
    pub n_qubits: usize,
    /// Variational layers for both PQC and VDSP.
    pub vl: usize,
    /// Layers of the MPD baseline.
    pub mpd_layers: usize,
    #[serde(default = "one")]
    pub vdsp_mpd_layers: usize,
    /// Replaces the table's target for this row.
    pub target: Option<Family>,
    pub exact: Option<ExactCounts>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactCounts {
    pub depth: usize,
    pub cx_count: usize,
    pub initial_ee: f64,
    pub final_ee: f64,
}

impl Manifest {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn builtin() -> Self {
        Self::from_toml_str(DEFAULT_MANIFEST).expect("shipped manifest parses")
    }
}

/// Which rows of a manifest to run.
#[derive(Clone, Debug, Default)]
pub struct BenchFilter {
    /// Only tables with these names; all when empty.
    pub tables: Vec<String>,
    pub max_qubits: Option<usize>,
}

impl BenchFilter {
    fn keeps(&self, table: &BenchTable, row: &BenchRow) -> bool {
        (self.tables.is_empty() || self.tables.contains(&table.name))
            && self.max_qubits.is_none_or(|m| row.n_qubits <= m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchOutput {
    /// PQC, MPD, VDSP for every selected row, in manifest order.
    pub reports: Vec<RunReport>,
    pub references: Vec<ExactReference>,
}

/// Run every selected row. Rows run in parallel; output follows the manifest.
pub fn run_manifest(manifest: &Manifest, filter: &BenchFilter, cfg: &TrainConfig) -> Result<BenchOutput> {
    let mut jobs = Vec::new();
    let mut references = Vec::new();
    for table in &manifest.table {
        for row in table.row.iter().filter(|r| filter.keeps(table, r)) {
            let family = row.target.clone().unwrap_or_else(|| table.target.clone());
            let spec = TargetSpec::with_default_grid(family, row.n_qubits);
            for method in [Method::Pqc, Method::Mpd, Method::Vdsp] {
                jobs.push((spec.clone(), row, method));
            }
            if let Some(e) = row.exact {
                references.push(ExactReference {
                    family: table.name.clone(),
                    n_qubits: row.n_qubits,
                    depth: e.depth,
                    cx_count: e.cx_count,
                    initial_ee: e.initial_ee,
                    final_ee: e.final_ee,
                });
            }
        }
    }
    let reports = jobs
        .into_par_iter()
        .map(|(spec, row, method)| {
            let out = match method {
                Method::Pqc => run_baseline_pqc(&spec, row.vl, cfg)?,
                Method::Mpd => run_baseline_mpd(&spec, row.mpd_layers)?,
                Method::Vdsp => run_vdsp(&spec, row.vl, row.vdsp_mpd_layers, cfg, None)?,
            };
            Ok(out.report)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchOutput { reports, references })
}
