//! Matrix-product disentanglers.
//!
//! A layer prepares the `χ = 2` truncation of a state as a staircase of
//! two-qubit gates: the gate on `(k, k+1)` reads the bond index from qubit `k`
//! and writes the physical index back to it while emitting the next bond index
//! on qubit `k+1`. A final single-qubit gate converts the last bond index into
//! the last physical index.

use nalgebra::{DMatrix, Matrix2, Matrix4};

use crate::circuits::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{complete_orthonormal, Svd};
use crate::targets::Statevector;
use crate::tensornet::{bond_spectra, to_mps};

/// Bond dimension of every disentangler layer.
pub const MPD_CHI: usize = 2;

/// Relative singular-value cutoff used while right-canonicalizing.
const RIGHT_SWEEP_CUTOFF: f64 = 1e-13;

/// One disentangler layer: `n − 1` two-qubit gates followed by one
/// single-qubit gate, in application order.
#[derive(Clone, Debug, PartialEq)]
pub struct MpdLayer {
    n_qubits: usize,
    gates: Vec<Gate>,
    truncation_errors: Vec<f64>,
}

impl MpdLayer {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// `ε_i = √(1 − Λ_1² − Λ_2²)` at every bond of the source state.
    pub fn truncation_errors(&self) -> &[f64] {
        &self.truncation_errors
    }

    pub fn to_circuit(&self) -> Circuit {
        Circuit::from_gates(self.n_qubits, self.gates.clone()).expect("layer gates are in range")
    }
}

/// Right-canonical `χ ≤ 2` tensors. Site `k` is `(χ_{k−1}·2) × χ_k`, row
/// `left·2 + physical`.
struct RightCanonical {
    sites: Vec<DMatrix<f64>>,
}

impl RightCanonical {
    fn from_state(state: &Statevector) -> Result<Self> {
        let (mps, _) = to_mps(state, Some(MPD_CHI))?;
        let mut sites = mps.sites().to_vec();
        let n = sites.len();

        // left-canonical, so the norm sits in the last site
        let norm = sites[n - 1].norm();
        if norm == 0.0 {
            return Err(Error::DegenerateTarget);
        }
        sites[n - 1] /= norm;

        for k in (1..n).rev() {
            let site = &sites[k];
            let (chi_l, chi_r) = (site.nrows() / 2, site.ncols());
            let m = DMatrix::from_fn(chi_l, 2 * chi_r, |l, col| site[(l * 2 + col / chi_r, col % chi_r)]);
            let mut svd = Svd::new(m);
            let keep = svd.rank(RIGHT_SWEEP_CUTOFF);
            svd.truncate(keep);
            sites[k] = DMatrix::from_fn(keep * 2, chi_r, |row, r| svd.vt[(row / 2, (row % 2) * chi_r + r)]);
            let us = &svd.u * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&svd.s));
            sites[k - 1] = &sites[k - 1] * us;
        }
        Ok(Self { sites })
    }

    fn chi_left(&self, k: usize) -> usize {
        self.sites[k].nrows() / 2
    }

    fn chi_right(&self, k: usize) -> usize {
        self.sites[k].ncols()
    }

    /// Output vector of the gate for site `k` given incoming bond `a`,
    /// indexed `physical·2 + outgoing` (or just `physical` on the last site).
    fn column(&self, k: usize, a: usize) -> Vec<f64> {
        let site = &self.sites[k];
        let chi_r = site.ncols();
        if k + 1 == self.sites.len() {
            return vec![site[(a * 2, 0)], site[(a * 2 + 1, 0)]];
        }
        let mut v = vec![0.0; 4];
        for p in 0..2 {
            for r in 0..chi_r {
                v[p * 2 + r] = site[(a * 2 + p, r)];
            }
        }
        v
    }

    /// Make the last gate a proper rotation by flipping the sign of the
    /// second basis vector of the last bond. The state is unchanged.
    fn fix_last_orientation(&mut self) {
        let n = self.sites.len();
        if self.chi_left(n - 1) < 2 {
            return;
        }
        let last = &self.sites[n - 1];
        let det = last[(0, 0)] * last[(3, 0)] - last[(1, 0)] * last[(2, 0)];
        if det < 0.0 {
            self.sites[n - 1].row_mut(2).neg_mut();
            self.sites[n - 1].row_mut(3).neg_mut();
            self.sites[n - 2].column_mut(1).neg_mut();
        }
    }
}

/// Fill in the missing columns of an orthogonal matrix.
///
/// `given` lists `(position, column)`; the free positions receive the
/// deterministic orthonormal completion in index order, and the last free
/// column is negated when needed to make the determinant +1.
fn embed(dim: usize, given: &[(usize, Vec<f64>)]) -> DMatrix<f64> {
    let partial = DMatrix::from_fn(dim, given.len(), |i, j| given[j].1[i]);
    let full = complete_orthonormal(&partial);
    let mut out = DMatrix::zeros(dim, dim);
    let mut extra = given.len();
    let mut last_free = None;
    for pos in 0..dim {
        if let Some(j) = given.iter().position(|(p, _)| *p == pos) {
            out.set_column(pos, &full.column(j));
        } else {
            out.set_column(pos, &full.column(extra));
            extra += 1;
            last_free = Some(pos);
        }
    }
    if out.determinant() < 0.0 {
        if let Some(pos) = last_free {
            out.column_mut(pos).neg_mut();
        }
    }
    out
}

/// Single disentangler layer preparing the renormalized `χ = 2` truncation of
/// `state` from `|0…0⟩`.
pub fn mpd_layer(state: &Statevector) -> Result<MpdLayer> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::InvalidTarget(format!(
            "a disentangler needs at least 2 qubits, got {n}"
        )));
    }
    let truncation_errors = bond_spectra(state)
        .iter()
        .map(|s| (1.0 - s.iter().take(MPD_CHI).map(|v| v * v).sum::<f64>()).max(0.0).sqrt())
        .collect();

    let mut rc = RightCanonical::from_state(state)?;
    rc.fix_last_orientation();

    let mut gates = Vec::with_capacity(n);
    for k in 0..n - 1 {
        // incoming bond on qubit k, fresh |0⟩ on qubit k+1
        let given: Vec<(usize, Vec<f64>)> = (0..rc.chi_left(k)).map(|a| (a * 2, rc.column(k, a))).collect();
        debug_assert!(rc.chi_right(k) <= MPD_CHI);
        let m = embed(4, &given);
        gates.push(Gate::u2((k, k + 1), Matrix4::from_fn(|i, j| m[(i, j)]))?);
    }
    let given: Vec<(usize, Vec<f64>)> = (0..rc.chi_left(n - 1)).map(|a| (a, rc.column(n - 1, a))).collect();
    let m = embed(2, &given);
    gates.push(Gate::u1(n - 1, Matrix2::from_fn(|i, j| m[(i, j)]))?);

    Ok(MpdLayer {
        n_qubits: n,
        gates,
        truncation_errors,
    })
}

/// Build `layers` disentanglers iteratively: each layer is fitted to the state
/// left over after undoing the previous ones.
///
/// The result is in application order: the last layer computed comes first,
/// so concatenating the circuits and applying them to `|0…0⟩` approximates
/// `state`.
pub fn disentangle_layers(state: &Statevector, layers: usize) -> Result<Vec<MpdLayer>> {
    if layers == 0 {
        return Err(Error::Config("need at least one disentangler layer".into()));
    }
    let mut out = Vec::with_capacity(layers);
    let mut current = state.clone();
    for i in 0..layers {
        let layer = mpd_layer(&current)?;
        if i + 1 < layers {
            current = layer.to_circuit().inverse().simulate(&current)?;
        }
        out.push(layer);
    }
    out.reverse();
    Ok(out)
}

/// Concatenate layers (already in application order) into one circuit.
pub fn layers_circuit(layers: &[MpdLayer]) -> Result<Circuit> {
    let n = layers
        .first()
        .map(MpdLayer::n_qubits)
        .ok_or_else(|| Error::Config("no layers".into()))?;
    let mut c = Circuit::new(n);
    for l in layers {
        c.extend(&l.to_circuit())?;
    }
    Ok(c)
}
