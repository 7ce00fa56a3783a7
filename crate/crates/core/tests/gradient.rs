//! Finite-difference gradients against closed forms.

use vdsp::circuits::build_pqc;
use vdsp::targets::Statevector;
use vdsp::train::{eval_loss, grad_fd, LossContext, LossKind};

/// One layer on two qubits is `CX · (Ry(θ0) ⊗ Ry(θ1))`. With `θ1 = 0` it maps
/// `|00⟩` to `cos(θ0/2)|00⟩ + sin(θ0/2)|11⟩`, so the distance to `|11⟩` is
/// `√(2 − 2 sin(θ0/2))`.
#[test]
fn distance_gradient_closed_form() {
    let template = build_pqc(2, 1, false).unwrap();
    assert_eq!(template.n_params(), 2);
    let ctx = LossContext::with_target(Statevector::basis(2, 0b11));
    let theta = [0.7, 0.0];

    let loss = eval_loss(LossKind::Distance, &template, &theta, &ctx).unwrap();
    let s = (0.35f64).sin();
    assert!((loss - (2.0 - 2.0 * s).sqrt()).abs() < 1e-14);

    let g = grad_fd(LossKind::Distance, &template, &theta, &ctx, 1e-5).unwrap();
    let exact = -(0.35f64).cos() / (2.0 * (2.0 - 2.0 * s).sqrt());
    assert!((g[0] - exact).abs() < 1e-6, "{} vs {exact}", g[0]);
}

/// Same circuit, infidelity `1 − sin²(θ0/2)` has derivative `−sin(θ0/2)cos(θ0/2)`.
#[test]
fn infidelity_gradient_closed_form() {
    let template = build_pqc(2, 1, false).unwrap();
    let ctx = LossContext::with_target(Statevector::basis(2, 0b11));
    for t in [0.3, 1.1, 2.5] {
        let g = grad_fd(LossKind::Infidelity, &template, &[t, 0.0], &ctx, 1e-5).unwrap();
        let exact = -(t / 2.0).sin() * (t / 2.0).cos();
        assert!((g[0] - exact).abs() < 1e-8);
    }
}

/// Halving the step changes a central difference by O(h²).
#[test]
fn step_halving_agreement() {
    let template = build_pqc(5, 2, true).unwrap();
    let target = Statevector::normalized(5, (0..32).map(|i| (i as f64 * 0.37).cos()).collect()).unwrap();
    let ctx = LossContext::with_target(target);
    let theta = vdsp::train::initial_parameters(template.n_params(), 1.0, 11).unwrap();
    let a = grad_fd(LossKind::Distance, &template, &theta, &ctx, 1e-4).unwrap();
    let b = grad_fd(LossKind::Distance, &template, &theta, &ctx, 5e-5).unwrap();
    let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    assert!(diff / norm < 1e-4, "relative difference {}", diff / norm);
}
