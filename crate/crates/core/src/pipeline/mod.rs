//! End-to-end runs: VDSP and its two baselines, report tables, layer sweeps,
//! the MPO bond-dimension table and manifest-driven benchmarks.

mod bench;
mod config;
mod mpo_table;
mod report;
mod run;

pub use bench::{run_manifest, BenchFilter, BenchOutput, BenchRow, BenchTable, ExactCounts, Manifest, DEFAULT_MANIFEST};
pub use config::RunConfig;
pub use mpo_table::{export_mpo_table, mpo_table, MpoRow, MPO_TABLE_MAX_QUBITS};
pub use report::{emit_references, emit_report, parse_report, ExactReference, Method, ReportFormat, RunReport};
pub use run::{
    export_sweep, layer_sweep, run_baseline_mpd, run_baseline_pqc, run_vdsp, RunOutput, NORM_IDENTITY_TOL,
};
