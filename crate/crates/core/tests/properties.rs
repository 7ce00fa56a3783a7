use nalgebra::{DMatrix, Matrix4};
use proptest::prelude::*;
use vdsp::circuits::{
    build_pqc, export_qasm, parse_qasm, pqc_cx_count, pqc_param_count, synthesize, synthesize_two_qubit, Circuit,
    Gate, Slot,
};
use vdsp::mpd::{mpd_layer, MPD_CHI};
use vdsp::targets::Statevector;
use vdsp::tensornet::{bond_spectra, cumulative_ee, mps_to_statevector, to_mps, DEFAULT_MAX_QUBITS};

fn state(max_qubits: usize) -> impl Strategy<Value = Statevector> {
    (2..=max_qubits).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, 1 << n)
            .prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 1e-3))
            .prop_map(move |v| Statevector::normalized(n, v).unwrap())
    })
}

fn angles(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-7.0f64..7.0, len)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Orthogonal factor of the QR decomposition of `fill`.
fn orthogonal4(fill: &[f64]) -> Matrix4<f64> {
    let q = DMatrix::from_column_slice(4, 4, fill).qr().q();
    Matrix4::from_fn(|i, j| q[(i, j)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mps_round_trip(psi in state(8)) {
        let (mps, _) = to_mps(&psi, None).unwrap();
        let back = mps_to_statevector(&mps, DEFAULT_MAX_QUBITS).unwrap();
        prop_assert!(max_abs_diff(psi.amplitudes(), back.amplitudes()) < 1e-10);
    }

    #[test]
    fn bond_spectra_are_normalized(psi in state(8)) {
        for s in bond_spectra(&psi).iter() {
            let total: f64 = s.iter().map(|v| v * v).sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
            prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn local_rotations_keep_entropy((psi, theta) in state(7).prop_flat_map(|p| {
        let n = p.n_qubits();
        (Just(p), angles(n))
    })) {
        let n = psi.n_qubits();
        let gates = theta.iter().enumerate().map(|(q, &a)| Gate::ry(q, a)).collect();
        let rotated = Circuit::from_gates(n, gates).unwrap().simulate(&psi).unwrap();
        let before = cumulative_ee(&bond_spectra(&psi));
        let after = cumulative_ee(&bond_spectra(&rotated));
        prop_assert!((before - after).abs() < 1e-10, "{} vs {}", before, after);
    }

    #[test]
    fn pqc_preserves_norm_and_inverts((n, m, final_layer) in (2usize..=8, 1usize..=4, any::<bool>()), seed in any::<u64>()) {
        let template = build_pqc(n, m, final_layer).unwrap();
        let theta = vdsp::train::initial_parameters(template.n_params(), 2.0, seed).unwrap();
        let c = template.bind(&theta).unwrap();
        let psi = Statevector::normalized(n, (0..1 << n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect()).unwrap();
        let out = c.simulate(&psi).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        let back = c.inverse().simulate(&out).unwrap();
        prop_assert!(max_abs_diff(back.amplitudes(), psi.amplitudes()) < 1e-10);
    }

    #[test]
    fn pqc_counts_match_formulas(n in 2usize..=16, m in 1usize..=8, final_layer in any::<bool>()) {
        let t = build_pqc(n, m, final_layer).unwrap();
        let rys = t.slots().iter().filter(|s| matches!(s, Slot::Ry { .. })).count();
        let cxs = t.slots().iter().filter(|s| matches!(s, Slot::Cx { .. })).count();
        let expected_params = m * (n + 2 * ((n - 1) / 2)) + if final_layer { n } else { 0 };
        prop_assert_eq!(rys, expected_params);
        prop_assert_eq!(t.n_params(), pqc_param_count(n, m, final_layer));
        prop_assert_eq!(pqc_param_count(n, m, final_layer), expected_params);
        prop_assert_eq!(cxs, m * (n / 2 + (n - 1) / 2));
        prop_assert_eq!(pqc_cx_count(n, m), cxs);
    }

    #[test]
    fn pqc_depth_does_not_grow_with_width(n in 3usize..=12, m in 1usize..=6) {
        let t = build_pqc(n, m, true).unwrap();
        let depth = t.bind(&vec![0.3; t.n_params()]).unwrap().metrics().unwrap().depth;
        prop_assert_eq!(depth, 4 * m + 1);
    }

    #[test]
    fn two_qubit_synthesis_is_exact(fill in prop::collection::vec(-1.0f64..1.0, 16), lo in 0usize..3) {
        prop_assume!(DMatrix::from_column_slice(4, 4, &fill).determinant().abs() > 1e-3);
        let o = orthogonal4(&fill);
        let gates = synthesize_two_qubit(lo, lo + 1, &o).unwrap();
        let cx = gates.iter().filter(|g| matches!(g, Gate::Cx { .. })).count();
        prop_assert!(cx <= 3 + usize::from(o.determinant() < 0.0));
        let raw = Circuit::from_gates(lo + 2, vec![Gate::u2((lo, lo + 1), o).unwrap()]).unwrap();
        let synth = Circuit::from_gates(lo + 2, gates).unwrap();
        let diff = (raw.unitary() - synth.unitary()).abs().max();
        prop_assert!(diff < 1e-8, "residual {}", diff);
    }

    #[test]
    fn qasm_round_trip(n in 2usize..=6, seed in any::<u64>()) {
        let t = build_pqc(n, 2, true).unwrap();
        let theta = vdsp::train::initial_parameters(t.n_params(), 1.0, seed).unwrap();
        let c = t.bind(&theta).unwrap();
        prop_assert_eq!(parse_qasm(&export_qasm(&c).unwrap()).unwrap(), c);
    }

    #[test]
    fn mpd_layer_prepares_normalized_truncation(psi in state(7)) {
        let n = psi.n_qubits();
        let layer = mpd_layer(&psi).unwrap();
        let (mps, _) = to_mps(&psi, Some(MPD_CHI)).unwrap();
        let trunc = mps_to_statevector(&mps, DEFAULT_MAX_QUBITS).unwrap();
        let expected = Statevector::normalized(n, trunc.into_amplitudes()).unwrap();
        let c = synthesize(&layer.to_circuit()).unwrap();
        let prepared = c.simulate(&Statevector::zero(n)).unwrap();
        prop_assert!(max_abs_diff(prepared.amplitudes(), expected.amplitudes()) < 1e-9);
        prop_assert!(c.metrics().unwrap().cx_count <= 3 * (n - 1));
    }
}
