use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use vdsp::circuits::parse_qasm;
use vdsp::pipeline::{parse_report, Method};
use vdsp::targets::{build_target, Statevector, TargetSpec};

fn vdsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdsp"))
        .args(args)
        .env("RUST_BACKTRACE", "0")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = vdsp(args);
    assert!(
        out.status.success(),
        "vdsp {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn target_exports_state_and_entropy() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let stdout = ok(&["target", "--family", "ricker1d", "--qubits", "6", "--out-dir", dir]);
    assert!(stdout.contains("cumulative_ee"));
    let state = read(tmp.path(), "state.dat");
    assert_eq!(state.lines().next(), Some("x psi"));
    assert_eq!(state.lines().count(), 65);
    let first: f64 = state.lines().nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
    assert_eq!(first, -1.0);
}

#[test]
fn mpd_writes_every_artifact() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_str().unwrap();
    ok(&["mpd", "--family", "normal1d", "--qubits", "6", "--mpd-layers", "2", "--qasm", "--out-dir", dir]);
    for name in ["report.txt", "report.json", "state.dat", "circuit.qasm"] {
        assert!(tmp.path().join(name).exists(), "{name} missing");
    }
    // no training happened
    assert!(!tmp.path().join("training.dat").exists());

    let reports = parse_report(&read(tmp.path(), "report.json")).unwrap();
    assert_eq!(reports.len(), 1);
    let r = &reports[0];
    assert_eq!((r.method, r.mpd_layers, r.wall_time), (Method::Mpd, Some(2), None));

    // the exported circuit reproduces the reported accuracy
    let circuit = parse_qasm(&read(tmp.path(), "circuit.qasm")).unwrap();
    let psi = build_target(&TargetSpec::normal1d(6, 0.5, 0.1)).unwrap();
    let prepared = circuit.simulate(&Statevector::zero(6)).unwrap();
    assert!((1.0 - psi.distance(&prepared) - r.accuracy).abs() < 1e-12);
    assert_eq!(circuit.metrics().unwrap().cx_count, r.cx_count);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        ok(&[
            "vdsp", "--family", "normal1d", "--qubits", "5", "--vl", "1", "--iters", "25", "--seed", "4", "--qasm",
            "--out-dir", dir.path().to_str().unwrap(),
        ]);
    }
    for name in ["report.txt", "report.json", "training.dat", "state.dat", "circuit.qasm"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name} differs");
    }
    let history = read(a.path(), "training.dat");
    assert_eq!(history.lines().next(), Some("iter loss"));
}

#[test]
fn timings_are_opt_in() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_str().unwrap();
    ok(&["mpd", "--family", "normal1d", "--qubits", "4", "--timings", "--out-dir", dir]);
    let r = &parse_report(&read(tmp.path(), "report.json")).unwrap()[0];
    assert!(r.wall_time.is_some());
    assert!(read(tmp.path(), "report.txt").contains("Time (s)"));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(
        &cfg,
        r#"
vl = 1
mpd_layers = 2

[target]
family = "normal2d"
mu = [0.5, 0.5]
cov = [[0.1, 0.01], [0.01, 0.1]]
grid = { n_qubits = 6, lo = 0.0, hi = 1.0, dims = 2 }

[train]
max_iters = 5
seed = 3
"#,
    )
    .unwrap();
    let out = tmp.path().join("out");
    ok(&[
        "vdsp", "--config", cfg.to_str().unwrap(), "--qubits", "4", "--out-dir", out.to_str().unwrap(),
    ]);
    let r = &parse_report(&read(&out, "report.json")).unwrap()[0];
    assert_eq!(r.family, "normal2d");
    assert_eq!((r.n_qubits, r.vl, r.mpd_layers, r.seed), (4, Some(1), Some(2), Some(3)));
    assert!(r.iterations.unwrap() <= 5);
    assert_eq!(read(&out, "state.dat").lines().next(), Some("x y psi psi_hat"));
}

#[test]
fn train_subcommand_losses() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let stdout = ok(&["train", "--family", "normal1d", "--qubits", "4", "--vl", "1", "--iters", "10", "--out-dir", dir]);
    assert!(stdout.starts_with("loss distance\n"));
    assert!(read(tmp.path(), "state.dat").starts_with("x psi psi_hat\n"));

    let stdout = ok(&[
        "train", "--family", "normal1d", "--qubits", "4", "--vl", "1", "--iters", "10", "--loss", "ee", "--qasm",
        "--out-dir", dir,
    ]);
    assert!(stdout.contains("loss cumulative_ee\nqubits 4\nvl 1\nparameters 6\n"));
    assert!(read(tmp.path(), "state.dat").starts_with("x psi v_psi\n"));
    assert_eq!(parse_qasm(&read(tmp.path(), "circuit.qasm")).unwrap().n_qubits(), 4);
}

#[test]
fn sweep_and_mpo_table() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_str().unwrap();
    ok(&["sweep", "--family", "normal1d", "--qubits", "4", "--max-layers", "2", "--iters", "3", "--out-dir", dir]);
    let sweep = read(tmp.path(), "sweep.dat");
    assert_eq!(sweep.lines().count(), 1 + 3 * 2);
    assert_eq!(parse_report(&read(tmp.path(), "report.json")).unwrap().len(), 6);

    let stdout = ok(&["mpo-table", "--max-qubits", "4", "--out-dir", dir]);
    assert!(stdout.starts_with("n layers max_bond_dim\n2 1 2\n2 2 4\n"));
}

#[test]
fn bench_with_custom_manifest() {
    let tmp = TempDir::new().unwrap();
    let manifest = tmp.path().join("m.toml");
    fs::write(
        &manifest,
        "[[table]]\nname = \"tiny\"\ntarget = { family = \"normal1d\", mu = 0.5, sigma = 0.1 }\n\
         [[table.row]]\nn_qubits = 4\nvl = 1\nmpd_layers = 2\n\
         exact = { depth = 10, cx_count = 5, initial_ee = 0.0, final_ee = 0.0 }\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    ok(&[
        "bench", "--manifest", manifest.to_str().unwrap(), "--iters", "3", "--out-dir", out.to_str().unwrap(),
    ]);
    let methods: Vec<Method> = parse_report(&read(&out, "report.json")).unwrap().iter().map(|r| r.method).collect();
    assert_eq!(methods, [Method::Pqc, Method::Mpd, Method::Vdsp]);
    assert!(read(&out, "report.txt").contains("Exact preparation (fixed reference values, not recomputed)"));
}

#[test]
fn bad_invocations_fail_cleanly() {
    for args in [
        vec!["vdsp", "--qubits", "4"],
        vec!["vdsp", "--family", "sparse", "--qubits", "4"],
        vec!["vdsp", "--family", "normal1d", "--qubits", "4", "--loss", "bogus"],
        vec!["vdsp", "--family", "normal1d", "--qubits", "4", "--loss", "distance"],
        vec!["mpd", "--family", "normal2d", "--qubits", "5"],
        vec!["mpo-table", "--max-qubits", "13"],
    ] {
        let out = vdsp(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}
