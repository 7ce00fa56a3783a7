mod args;

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::Parser;
use vdsp::circuits::{build_pqc, export_qasm, Circuit};
use vdsp::pipeline::{
    emit_references, emit_report, export_mpo_table, export_sweep, layer_sweep, mpo_table, run_baseline_mpd,
    run_manifest, run_vdsp, BenchFilter, Manifest, ReportFormat, RunOutput, RunReport,
};
use vdsp::targets::{build_target, export_states, export_target, Statevector, TargetSpec};
use vdsp::tensornet::{bond_entropy, bond_spectra, cumulative_ee};
use vdsp::train::{export_history, train, LossContext, LossKind, TrainConfig};

use args::{train_overrides, Cli, Command, Common};

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Target(c) => cmd_target(&c),
        Command::Train(c) => cmd_train(&c),
        Command::Mpd(c) => {
            let r = c.resolve()?;
            let out = run_baseline_mpd(&r.target, r.mpd_layers)?;
            write_run(&c, &r.target, out)
        }
        Command::Vdsp(c) => {
            let r = c.resolve()?;
            let out = run_vdsp(&r.target, r.vl, r.mpd_layers, &r.train, r.loss)?;
            write_run(&c, &r.target, out)
        }
        Command::Sweep { common, max_layers } => {
            let r = common.resolve()?;
            let reports = strip_times(layer_sweep(&r.target, max_layers, &r.train)?, common.timings);
            let dir = out_dir(&common.out_dir)?;
            write(&dir.join("sweep.dat"), &export_sweep(&reports))?;
            write_reports(dir, &reports, None)
        }
        Command::MpoTable {
            max_qubits,
            cutoff,
            seed,
            out_dir: dir,
        } => {
            let rows = mpo_table(max_qubits, cutoff, seed)?;
            let dir = out_dir(&dir)?;
            write(&dir.join("report.txt"), &export_mpo_table(&rows))?;
            write(&dir.join("report.json"), &(serde_json::to_string_pretty(&rows)? + "\n"))?;
            print!("{}", export_mpo_table(&rows));
            Ok(())
        }
        Command::Bench {
            manifest,
            tables,
            max_qubits,
            iters,
            seed,
            out_dir: dir,
            timings,
        } => {
            let manifest = match manifest {
                Some(p) => Manifest::from_toml_str(&fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
                None => Manifest::builtin(),
            };
            let cfg = train_overrides(TrainConfig::default(), iters, seed, None);
            let filter = BenchFilter { tables, max_qubits };
            let out = run_manifest(&manifest, &filter, &cfg)?;
            let reports = strip_times(out.reports, timings);
            let refs = (!out.references.is_empty()).then(|| emit_references(&out.references));
            write_reports(out_dir(&dir)?, &reports, refs)
        }
    }
}

fn cmd_target(c: &Common) -> Result<()> {
    let r = c.resolve()?;
    let psi = build_target(&r.target)?;
    let spectra = bond_spectra(&psi);
    let mut summary = format!(
        "family {}\nqubits {}\ncumulative_ee {:.6}\nbond entropies",
        r.target.family.name(),
        psi.n_qubits(),
        cumulative_ee(&spectra)
    );
    for k in 0..spectra.n_bonds() {
        summary.push_str(&format!(" {:.6}", bond_entropy(&spectra, k)?));
    }
    summary.push('\n');
    let dir = out_dir(&c.out_dir)?;
    write(&dir.join("state.dat"), &export_target(&r.target, &psi)?)?;
    write(&dir.join("report.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

/// Train a bare ansatz. Entropy losses transform the target, the others
/// prepare it; only the latter get the closing rotation layer.
fn cmd_train(c: &Common) -> Result<()> {
    let r = c.resolve()?;
    let kind = r.loss.unwrap_or(LossKind::Distance);
    let psi = build_target(&r.target)?;
    let template = build_pqc(psi.n_qubits(), r.vl, !kind.is_entropy())?;
    let ctx = if kind.is_entropy() {
        LossContext::with_initial(psi.clone())
    } else {
        LossContext::with_target(psi.clone())
    };
    let report = train(kind, &template, &ctx, &r.train)?;
    let circuit = template.bind(&report.theta)?;
    let produced = if kind.is_entropy() {
        circuit.simulate(&psi)?
    } else {
        circuit.simulate(&Statevector::zero(psi.n_qubits()))?
    };

    let summary = format!(
        "loss {}\nqubits {}\nvl {}\nparameters {}\ninitial_loss {:.12e}\nfinal_loss {:.12e}\niterations {}\nstopped_early {}\n",
        kind.name(),
        psi.n_qubits(),
        r.vl,
        template.n_params(),
        report.initial_loss,
        report.final_loss,
        report.iterations,
        report.stopped_early
    );
    let dir = out_dir(&c.out_dir)?;
    write(&dir.join("report.txt"), &summary)?;
    write(&dir.join("report.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    write(&dir.join("training.dat"), &export_history(&report))?;
    let name = if kind.is_entropy() { "v_psi" } else { "psi_hat" };
    write(&dir.join("state.dat"), &export_states(&r.target, &[("psi", &psi), (name, &produced)])?)?;
    if c.qasm {
        write_qasm(dir, &circuit)?;
    }
    print!("{summary}");
    Ok(())
}

fn write_run(c: &Common, spec: &TargetSpec, mut out: RunOutput) -> Result<()> {
    if !c.timings {
        out.report.wall_time = None;
    }
    let dir = out_dir(&c.out_dir)?;
    if let Some(t) = &out.training {
        write(&dir.join("training.dat"), &export_history(t))?;
    }
    write(
        &dir.join("state.dat"),
        &export_states(spec, &[("psi", &out.target), ("psi_hat", &out.prepared)])?,
    )?;
    if c.qasm {
        write_qasm(dir, &out.circuit)?;
    }
    write_reports(dir, std::slice::from_ref(&out.report), None)
}

fn write_reports(dir: &Path, reports: &[RunReport], references: Option<String>) -> Result<()> {
    let mut text = emit_report(reports, ReportFormat::Text)?;
    if let Some(refs) = references {
        text.push('\n');
        text.push_str(&refs);
    }
    write(&dir.join("report.txt"), &text)?;
    write(&dir.join("report.json"), &emit_report(reports, ReportFormat::Json)?)?;
    print!("{text}");
    Ok(())
}

fn write_qasm(dir: &Path, circuit: &Circuit) -> Result<()> {
    write(&dir.join("circuit.qasm"), &export_qasm(circuit)?)
}

fn strip_times(mut reports: Vec<RunReport>, keep: bool) -> Vec<RunReport> {
    if !keep {
        reports.iter_mut().for_each(|r| r.wall_time = None);
    }
    reports
}

fn out_dir(dir: &Path) -> Result<&Path> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
