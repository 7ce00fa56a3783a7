//! Loss functions over ansatz outputs and an Adam loop driven by central
//! finite differences.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::PqcTemplate;
use crate::error::{Error, Result};
use crate::targets::Statevector;
use crate::tensornet::{cumulative_ee_gram, sparse_ee_loss, spectra_of, BondSpectra};

/// Training objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `‖ψ − U(θ)|0⟩‖`
    Distance,
    /// `1 − ⟨ψ|U(θ)|0⟩²`
    Infidelity,
    /// Sub-leading entanglement entropy of `V(θ)ψ`.
    CumulativeEe,
    /// Sum of sub-leading singular values of `V(θ)ψ`.
    SparseEe,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Distance => "distance",
            LossKind::Infidelity => "infidelity",
            LossKind::CumulativeEe => "cumulative_ee",
            LossKind::SparseEe => "sparse_ee",
        }
    }

    /// Whether the loss transforms a given state rather than preparing one.
    pub fn is_entropy(self) -> bool {
        matches!(self, LossKind::CumulativeEe | LossKind::SparseEe)
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(LossKind::Distance),
            "infidelity" => Ok(LossKind::Infidelity),
            "cumulative_ee" | "ee" => Ok(LossKind::CumulativeEe),
            "sparse_ee" => Ok(LossKind::SparseEe),
            other => Err(Error::Config(format!("unknown loss {other:?}"))),
        }
    }
}

/// States a loss is evaluated against.
///
/// `target` is what distance/infidelity compare `U(θ)|0⟩` to; `initial` is the
/// state the entropy losses push through `V(θ)`.
#[derive(Clone, Debug, Default)]
pub struct LossContext {
    pub target: Option<Statevector>,
    pub initial: Option<Statevector>,
}

impl LossContext {
    pub fn with_target(target: Statevector) -> Self {
        Self {
            target: Some(target),
            initial: None,
        }
    }

    pub fn with_initial(initial: Statevector) -> Self {
        Self {
            target: None,
            initial: Some(initial),
        }
    }

    fn check(&self, kind: LossKind, n: usize) -> Result<&Statevector> {
        let state = if kind.is_entropy() {
            self.initial.as_ref().ok_or(Error::MissingTarget(kind.name()))?
        } else {
            self.target.as_ref().ok_or(Error::MissingTarget(kind.name()))?
        };
        if state.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: state.n_qubits(),
            });
        }
        Ok(state)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub max_iters: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub init_sigma: f64,
    pub fd_step: f64,
    pub seed: u64,
    /// Stop once the best loss has improved by less than
    /// `early_stop_rel_tol` (relative) over this many iterations.
    pub early_stop_window: usize,
    pub early_stop_rel_tol: f64,
    /// Keep every n-th iteration in the stored history.
    pub history_stride: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            init_sigma: 1.0,
            fd_step: 1e-5,
            seed: 0,
            early_stop_window: 500,
            early_stop_rel_tol: 1e-9,
            history_stride: 20,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("learning_rate", self.learning_rate),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("epsilon", self.epsilon),
            ("init_sigma", self.init_sigma),
            ("fd_step", self.fd_step),
            ("early_stop_rel_tol", self.early_stop_rel_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.beta1 >= 1.0 || self.beta2 >= 1.0 {
            return Err(Error::Config("Adam betas must be below 1".into()));
        }
        if self.max_iters == 0 || self.early_stop_window == 0 || self.history_stride == 0 {
            return Err(Error::Config(
                "max_iters, early_stop_window and history_stride must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryPoint {
    pub iter: usize,
    pub loss: f64,
    pub best: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Parameters with the lowest loss seen.
    pub theta: Vec<f64>,
    pub history: Vec<HistoryPoint>,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub iterations: usize,
    pub stopped_early: bool,
}

/// Evaluate `kind` at `theta`.
pub fn eval_loss(kind: LossKind, template: &PqcTemplate, theta: &[f64], ctx: &LossContext) -> Result<f64> {
    let state = ctx.check(kind, template.n_qubits())?;
    let mut buf = vec![0.0; state.amplitudes().len()];
    loss_with_buffer(kind, template, theta, state, &mut buf)
}

fn loss_with_buffer(
    kind: LossKind,
    template: &PqcTemplate,
    theta: &[f64],
    state: &Statevector,
    buf: &mut [f64],
) -> Result<f64> {
    let n = template.n_qubits();
    if kind.is_entropy() {
        buf.copy_from_slice(state.amplitudes());
        template.apply_in_place(theta, buf)?;
        return Ok(match kind {
            LossKind::CumulativeEe => cumulative_ee_gram(n, buf),
            // square roots of tiny Gram eigenvalues are noise; use the sweep
            _ => sparse_ee_loss(&BondSpectra::new(spectra_of(n, buf))),
        });
    }
    buf.iter_mut().for_each(|x| *x = 0.0);
    buf[0] = 1.0;
    template.apply_in_place(theta, buf)?;
    let target = state.amplitudes();
    Ok(match kind {
        LossKind::Distance => target
            .iter()
            .zip(buf.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt(),
        _ => {
            let overlap: f64 = target.iter().zip(buf.iter()).map(|(a, b)| a * b).sum();
            1.0 - overlap * overlap
        }
    })
}

/// Central finite-difference gradient. The `2P` shifted evaluations run in
/// parallel; each component depends only on its own pair of evaluations.
pub fn grad_fd(
    kind: LossKind,
    template: &PqcTemplate,
    theta: &[f64],
    ctx: &LossContext,
    h: f64,
) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::Config(format!("finite-difference step must be positive, got {h}")));
    }
    let state = ctx.check(kind, template.n_qubits())?;
    if theta.len() != template.n_params() {
        return Err(Error::ParameterLength {
            expected: template.n_params(),
            got: theta.len(),
        });
    }
    (0..theta.len())
        .into_par_iter()
        .map_init(
            || (theta.to_vec(), vec![0.0; state.amplitudes().len()]),
            |(shifted, buf), j| {
                let orig = shifted[j];
                shifted[j] = orig + h;
                let plus = loss_with_buffer(kind, template, shifted, state, buf)?;
                shifted[j] = orig - h;
                let minus = loss_with_buffer(kind, template, shifted, state, buf)?;
                shifted[j] = orig;
                Ok((plus - minus) / (2.0 * h))
            },
        )
        .collect()
}

/// `θ₀ ~ N(0, init_sigma²)` from a ChaCha8 stream seeded with `seed`.
pub fn initial_parameters(n_params: usize, init_sigma: f64, seed: u64) -> Result<Vec<f64>> {
    let normal = Normal::new(0.0, init_sigma).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_params).map(|_| normal.sample(&mut rng)).collect())
}

/// Adam on finite-difference gradients, keeping the best parameters seen.
pub fn train(kind: LossKind, template: &PqcTemplate, ctx: &LossContext, config: &TrainConfig) -> Result<TrainReport> {
    config.validate()?;
    let state = ctx.check(kind, template.n_qubits())?;
    let mut buf = vec![0.0; state.amplitudes().len()];
    let mut loss_at = |theta: &[f64], iter: usize| -> Result<f64> {
        let loss = loss_with_buffer(kind, template, theta, state, &mut buf)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { iter, loss });
        }
        Ok(loss)
    };

    let mut theta = initial_parameters(template.n_params(), config.init_sigma, config.seed)?;
    let initial_loss = loss_at(&theta, 0)?;
    let mut best = initial_loss;
    let mut best_theta = theta.clone();
    let mut history = vec![HistoryPoint {
        iter: 0,
        loss: initial_loss,
        best,
    }];
    // best loss at the start of every iteration, for the stopping window
    let mut best_trace = vec![best];

    let mut m = vec![0.0; theta.len()];
    let mut v = vec![0.0; theta.len()];
    let mut iterations = 0;
    let mut stopped_early = false;

    if best > 0.0 {
        for t in 1..=config.max_iters {
            let g = grad_fd(kind, template, &theta, ctx, config.fd_step)?;
            let b1t = 1.0 - config.beta1.powi(t as i32);
            let b2t = 1.0 - config.beta2.powi(t as i32);
            for j in 0..theta.len() {
                m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g[j];
                v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g[j] * g[j];
                let mhat = m[j] / b1t;
                let vhat = v[j] / b2t;
                theta[j] -= config.learning_rate * mhat / (vhat.sqrt() + config.epsilon);
            }
            let loss = loss_at(&theta, t)?;
            if loss < best {
                best = loss;
                best_theta.clone_from(&theta);
            }
            best_trace.push(best);
            iterations = t;

            let window_done = t >= config.early_stop_window && {
                let before = best_trace[t - config.early_stop_window];
                before - best <= config.early_stop_rel_tol * before.abs()
            };
            let last = t == config.max_iters || window_done || best == 0.0;
            if t % config.history_stride == 0 || last {
                history.push(HistoryPoint { iter: t, loss, best });
            }
            if window_done || best == 0.0 {
                stopped_early = t < config.max_iters;
                break;
            }
        }
    } else {
        stopped_early = true;
    }

    Ok(TrainReport {
        theta: best_theta,
        history,
        initial_loss,
        final_loss: best,
        iterations,
        stopped_early,
    })
}

/// Two-column `iter loss` text.
pub fn export_history(report: &TrainReport) -> String {
    let mut out = String::from("iter loss\n");
    for p in &report.history {
        out.push_str(&format!("{} {:.12e}\n", p.iter, p.loss));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::build_pqc;
    use crate::tensornet::{bond_spectra, cumulative_ee};

    fn wavy(n: usize) -> Statevector {
        Statevector::normalized(n, (0..1 << n).map(|i| (i as f64 * 0.9).sin() + 0.2).collect()).unwrap()
    }

    #[test]
    fn distance_zero_at_origin() {
        let t = build_pqc(3, 2, true).unwrap();
        let ctx = LossContext::with_target(Statevector::zero(3));
        let l = eval_loss(LossKind::Distance, &t, &vec![0.0; t.n_params()], &ctx).unwrap();
        assert_eq!(l, 0.0);
    }

    #[test]
    fn infidelity_orthogonal_target() {
        let t = build_pqc(3, 1, false).unwrap();
        let ctx = LossContext::with_target(Statevector::basis(3, 0b100));
        let l = eval_loss(LossKind::Infidelity, &t, &vec![0.0; t.n_params()], &ctx).unwrap();
        assert_eq!(l, 1.0);
    }

    #[test]
    fn missing_states_rejected() {
        let t = build_pqc(2, 1, false).unwrap();
        let theta = [0.0; 2];
        let only_target = LossContext::with_target(Statevector::zero(2));
        assert!(matches!(
            eval_loss(LossKind::CumulativeEe, &t, &theta, &only_target),
            Err(Error::MissingTarget(_))
        ));
        let only_initial = LossContext::with_initial(Statevector::zero(2));
        assert!(matches!(
            eval_loss(LossKind::Distance, &t, &theta, &only_initial),
            Err(Error::MissingTarget(_))
        ));
    }

    #[test]
    fn entropy_loss_matches_independent_route() {
        let t = build_pqc(6, 2, false).unwrap();
        let theta: Vec<f64> = (0..t.n_params()).map(|i| (i as f64 * 0.77).cos()).collect();
        let psi = wavy(6);
        let ctx = LossContext::with_initial(psi.clone());
        let via_train = eval_loss(LossKind::CumulativeEe, &t, &theta, &ctx).unwrap();
        let moved = t.bind(&theta).unwrap().simulate(&psi).unwrap();
        let direct = cumulative_ee(&bond_spectra(&moved));
        assert!((via_train - direct).abs() < 1e-12);
    }

    #[test]
    fn sparse_loss_switch() {
        let t = build_pqc(4, 2, false).unwrap();
        let theta = vec![0.3; t.n_params()];
        let psi = wavy(4);
        let ctx = LossContext::with_initial(psi.clone());
        let moved = t.bind(&theta).unwrap().simulate(&psi).unwrap();
        let l = eval_loss(LossKind::SparseEe, &t, &theta, &ctx).unwrap();
        assert!((l - sparse_ee_loss(&bond_spectra(&moved))).abs() < 1e-12);
    }

    #[test]
    fn gradient_step_halving() {
        let t = build_pqc(4, 2, true).unwrap();
        let theta: Vec<f64> = (0..t.n_params()).map(|i| 0.2 * i as f64 - 1.0).collect();
        let ctx = LossContext::with_target(wavy(4));
        let g1 = grad_fd(LossKind::Distance, &t, &theta, &ctx, 1e-5).unwrap();
        let g2 = grad_fd(LossKind::Distance, &t, &theta, &ctx, 1e-6).unwrap();
        let diff: f64 = g1.iter().zip(&g2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = g1.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(diff / norm < 1e-4);
    }

    #[test]
    fn product_state_is_a_noop() {
        // one brickwork layer crosses every bond at most once
        let t = build_pqc(5, 1, false).unwrap();
        let ctx = LossContext::with_initial(Statevector::zero(5));
        let report = train(LossKind::CumulativeEe, &t, &ctx, &TrainConfig::default()).unwrap();
        assert_eq!(report.initial_loss, 0.0);
        assert_eq!(report.final_loss, 0.0);
        assert_eq!(report.iterations, 0);
    }

    #[test]
    fn training_is_seeded_and_monotone() {
        let t = build_pqc(4, 2, true).unwrap();
        let ctx = LossContext::with_target(wavy(4));
        let cfg = TrainConfig {
            max_iters: 300,
            learning_rate: 1e-2,
            seed: 5,
            ..TrainConfig::default()
        };
        let a = train(LossKind::Distance, &t, &ctx, &cfg).unwrap();
        let b = train(LossKind::Distance, &t, &ctx, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.final_loss < a.initial_loss);
        assert!(a.history.windows(2).all(|w| w[1].best <= w[0].best));
        assert_eq!(a.history.len(), 300 / 20 + 1);
        assert!(export_history(&a).starts_with("iter loss\n0 "));
    }

    #[test]
    fn config_validation() {
        let bad = TrainConfig {
            learning_rate: -1.0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(TrainConfig::default().validate().is_ok());
        let t = build_pqc(2, 1, false).unwrap();
        let ctx = LossContext::with_target(Statevector::zero(2));
        assert!(grad_fd(LossKind::Distance, &t, &[0.0; 2], &ctx, 0.0).is_err());
    }
}
