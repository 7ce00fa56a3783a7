use std::time::Instant;

use rayon::prelude::*;

use super::report::{Method, RunReport};
use crate::circuits::{build_pqc, synthesize, Circuit};
use crate::error::{Error, Result};
use crate::mpd::{disentangle_layers, layers_circuit};
use crate::targets::{build_target, Statevector, TargetSpec};
use crate::tensornet::{bond_spectra, cumulative_ee, truncation_bound};
use crate::train::{train, LossContext, LossKind, TrainConfig, TrainReport};

/// Allowed gap in `‖ψ − V⁻¹U|0⟩‖ = ‖Vψ − U|0⟩‖`.
pub const NORM_IDENTITY_TOL: f64 = 1e-10;

/// Everything a single run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    /// Final preparation circuit over `{ry, cx}`.
    pub circuit: Circuit,
    pub report: RunReport,
    pub target: Statevector,
    /// `circuit` applied to `|0…0⟩`.
    pub prepared: Statevector,
    pub training: Option<TrainReport>,
    /// VDSP only: `|‖ψ − V⁻¹U|0⟩‖ − ‖Vψ − U|0⟩‖|`.
    pub norm_identity_gap: Option<f64>,
    /// VDSP only: truncation bound of the transformed state at `χ = 2`.
    pub truncation_bound: Option<f64>,
}

/// Entropy-minimizing PQC, MPD on the transformed state, then the inverse PQC.
///
/// `loss` defaults to the cumulative entropy, or the sparse loss for sparse
/// targets; distance-type losses are rejected.
pub fn run_vdsp(
    target: &TargetSpec,
    vl: usize,
    mpd_layers: usize,
    cfg: &TrainConfig,
    loss: Option<LossKind>,
) -> Result<RunOutput> {
    let start = Instant::now();
    check_layers("mpd_layers", mpd_layers)?;
    let psi = build_target(target)?;
    let n = psi.n_qubits();
    let kind = loss.unwrap_or(if target.family.is_sparse() {
        LossKind::SparseEe
    } else {
        LossKind::CumulativeEe
    });
    if !kind.is_entropy() {
        return Err(Error::Config(format!("VDSP needs an entropy loss, got {}", kind.name())));
    }

    let template = build_pqc(n, vl, false)?;
    let training = train(kind, &template, &LossContext::with_initial(psi.clone()), cfg)?;
    let v = template.bind(&training.theta)?;
    let transformed = v.simulate(&psi)?;
    let spectra = bond_spectra(&transformed);
    let reduced_ee = cumulative_ee(&spectra);
    let bound = truncation_bound(&spectra, 2);

    let layers = disentangle_layers(&transformed, mpd_layers)?;
    let u = layers_circuit(&layers)?;
    let phi = u.simulate(&Statevector::zero(n))?;
    let v_inv = v.inverse();
    let gap = (psi.distance(&v_inv.simulate(&phi)?) - transformed.distance(&phi)).abs();
    if !(gap <= NORM_IDENTITY_TOL) {
        return Err(Error::Invariant(format!(
            "norm identity off by {gap:.3e} (tolerance {NORM_IDENTITY_TOL:.0e})"
        )));
    }

    let mut raw = u;
    raw.extend(&v_inv)?;
    let circuit = synthesize(&raw)?;
    let mut out = finish(Method::Vdsp, target, psi, circuit, Some(cfg.seed), start)?;
    out.report.vl = Some(vl);
    out.report.mpd_layers = Some(mpd_layers);
    out.report.reduced_ee = Some(reduced_ee);
    out.report.iterations = Some(training.iterations);
    out.training = Some(training);
    out.norm_identity_gap = Some(gap);
    out.truncation_bound = Some(bound);
    Ok(out)
}

/// Distance-loss training of `PQC(n, vl)` with a closing rotation layer.
pub fn run_baseline_pqc(target: &TargetSpec, vl: usize, cfg: &TrainConfig) -> Result<RunOutput> {
    let start = Instant::now();
    let psi = build_target(target)?;
    let template = build_pqc(psi.n_qubits(), vl, true)?;
    let training = train(LossKind::Distance, &template, &LossContext::with_target(psi.clone()), cfg)?;
    let circuit = synthesize(&template.bind(&training.theta)?)?;
    let mut out = finish(Method::Pqc, target, psi, circuit, Some(cfg.seed), start)?;
    out.report.vl = Some(vl);
    out.report.iterations = Some(training.iterations);
    out.training = Some(training);
    Ok(out)
}

/// `mpd_layers` disentangler layers fitted directly to the target.
pub fn run_baseline_mpd(target: &TargetSpec, mpd_layers: usize) -> Result<RunOutput> {
    let start = Instant::now();
    check_layers("mpd_layers", mpd_layers)?;
    let psi = build_target(target)?;
    let layers = disentangle_layers(&psi, mpd_layers)?;
    let circuit = synthesize(&layers_circuit(&layers)?)?;
    let mut out = finish(Method::Mpd, target, psi, circuit, None, start)?;
    out.report.mpd_layers = Some(mpd_layers);
    Ok(out)
}

/// VDSP (`vl = k`, one MPD layer), PQC (`vl = k`) and MPD (`k` layers) for
/// every `k` in `1..=max_layers`, ordered by `k` then method.
pub fn layer_sweep(target: &TargetSpec, max_layers: usize, cfg: &TrainConfig) -> Result<Vec<RunReport>> {
    check_layers("max_layers", max_layers)?;
    let jobs: Vec<(usize, Method)> = (1..=max_layers)
        .flat_map(|k| [Method::Vdsp, Method::Pqc, Method::Mpd].map(|m| (k, m)))
        .collect();
    jobs.into_par_iter()
        .map(|(k, method)| {
            let out = match method {
                Method::Vdsp => run_vdsp(target, k, 1, cfg, None)?,
                Method::Pqc => run_baseline_pqc(target, k, cfg)?,
                Method::Mpd => run_baseline_mpd(target, k)?,
            };
            Ok(out.report)
        })
        .collect()
}

/// `layers method accuracy infidelity` columns for plotting.
pub fn export_sweep(reports: &[RunReport]) -> String {
    let mut out = String::from("layers method accuracy infidelity\n");
    for r in reports {
        let layers = match r.method {
            Method::Mpd => r.mpd_layers,
            _ => r.vl,
        };
        out.push_str(&format!(
            "{} {} {:.6} {:.6e}\n",
            layers.unwrap_or(0),
            r.method,
            r.accuracy,
            r.infidelity
        ));
    }
    out
}

fn check_layers(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(Error::Config(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// Score `circuit` against `psi` by simulating it from `|0…0⟩`.
fn finish(
    method: Method,
    spec: &TargetSpec,
    psi: Statevector,
    circuit: Circuit,
    seed: Option<u64>,
    start: Instant,
) -> Result<RunOutput> {
    let n = psi.n_qubits();
    let prepared = circuit.simulate(&Statevector::zero(n))?;
    let metrics = circuit.metrics()?;
    let overlap = psi.dot(&prepared);
    let report = RunReport {
        method,
        family: spec.family.name().to_string(),
        n_qubits: n,
        vl: None,
        mpd_layers: None,
        accuracy: (1.0 - psi.distance(&prepared)).clamp(0.0, 1.0),
        infidelity: (1.0 - overlap * overlap).max(0.0),
        depth: metrics.depth,
        cx_count: metrics.cx_count,
        initial_ee: cumulative_ee(&bond_spectra(&psi)),
        reduced_ee: None,
        final_ee: cumulative_ee(&bond_spectra(&prepared)),
        iterations: None,
        wall_time: Some(start.elapsed().as_secs_f64()),
        seed,
    };
    Ok(RunOutput {
        circuit,
        report,
        target: psi,
        prepared,
        training: None,
        norm_identity_gap: None,
        truncation_bound: None,
    })
}
