use nalgebra::{DMatrix, Matrix2, Matrix4};

use super::gate::Gate;
use crate::error::{Error, Result};
use crate::targets::Statevector;

/// Ordered gate list over `n_qubits` qubits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

/// Gate-count summary of a circuit synthesized to `{ry, cx}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metrics {
    pub cx_count: usize,
    pub depth: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let qubits = gate.qubits();
        for &q in &qubits {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    n: self.n_qubits,
                });
            }
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::NonAdjacent(qubits[0], qubits[1]));
        }
        if let Gate::U2 { qubits: (a, b), .. } = gate {
            if a.abs_diff(b) != 1 {
                return Err(Error::NonAdjacent(a, b));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Append all gates of `other` (applied after `self`).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Reversed gate order with every gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn has_raw_gates(&self) -> bool {
        self.gates.iter().any(Gate::is_raw)
    }

    /// CX count and greedy as-soon-as-possible depth.
    pub fn metrics(&self) -> Result<Metrics> {
        if self.has_raw_gates() {
            return Err(Error::SynthesizeFirst);
        }
        let mut level = vec![0usize; self.n_qubits];
        let mut cx_count = 0;
        for g in &self.gates {
            if matches!(g, Gate::Cx { .. }) {
                cx_count += 1;
            }
            let qs = g.qubits();
            let slot = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in qs {
                level[q] = slot;
            }
        }
        Ok(Metrics {
            cx_count,
            depth: level.into_iter().max().unwrap_or(0),
        })
    }

    /// Apply the circuit to `input`.
    pub fn simulate(&self, input: &Statevector) -> Result<Statevector> {
        if input.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: input.n_qubits(),
            });
        }
        let mut out = input.clone();
        self.apply_in_place(out.amplitudes_mut());
        Ok(out)
    }

    /// Apply the circuit to a raw amplitude buffer of length `2^n`.
    pub fn apply_in_place(&self, amps: &mut [f64]) {
        debug_assert_eq!(amps.len(), 1 << self.n_qubits);
        for g in &self.gates {
            apply_gate(self.n_qubits, g, amps);
        }
    }

    /// Dense `2^n × 2^n` matrix of the circuit (small `n` only).
    pub fn unitary(&self) -> DMatrix<f64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        let mut col = vec![0.0; dim];
        for j in 0..dim {
            col.iter_mut().for_each(|x| *x = 0.0);
            col[j] = 1.0;
            self.apply_in_place(&mut col);
            m.set_column(j, &nalgebra::DVector::from_column_slice(&col));
        }
        m
    }
}

#[inline]
fn shift(n: usize, q: usize) -> usize {
    n - 1 - q
}

pub(crate) fn apply_gate(n: usize, gate: &Gate, amps: &mut [f64]) {
    match gate {
        Gate::Ry { qubit, angle } => {
            let (s, c) = (angle / 2.0).sin_cos();
            apply_1q(n, *qubit, &Matrix2::new(c, -s, s, c), amps);
        }
        Gate::U1 { qubit, matrix } => apply_1q(n, *qubit, matrix, amps),
        Gate::Cx { control, target } => {
            let cm = 1usize << shift(n, *control);
            let tm = 1usize << shift(n, *target);
            for_each_pair(amps.len(), tm, |i, j| {
                if i & cm != 0 {
                    amps.swap(i, j);
                }
            });
        }
        Gate::U2 { qubits, matrix } => apply_2q(n, *qubits, matrix, amps),
    }
}

fn apply_1q(n: usize, q: usize, m: &Matrix2<f64>, amps: &mut [f64]) {
    let mask = 1usize << shift(n, q);
    let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    for_each_pair(amps.len(), mask, |i, j| {
        let (a, b) = (amps[i], amps[j]);
        amps[i] = m00 * a + m01 * b;
        amps[j] = m10 * a + m11 * b;
    });
}

/// Visit every `(i, i | mask)` with the `mask` bit of `i` clear.
#[inline(always)]
fn for_each_pair(len: usize, mask: usize, mut f: impl FnMut(usize, usize)) {
    for base in (0..len).step_by(2 * mask) {
        for i in base..base + mask {
            f(i, i + mask);
        }
    }
}

fn apply_2q(n: usize, (qa, qb): (usize, usize), m: &Matrix4<f64>, amps: &mut [f64]) {
    let ma = 1usize << shift(n, qa);
    let mb = 1usize << shift(n, qb);
    for i in 0..amps.len() {
        if i & (ma | mb) == 0 {
            let idx = [i, i | mb, i | ma, i | ma | mb];
            let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
            for (r, &slot) in idx.iter().enumerate() {
                amps[slot] = (0..4).map(|c| m[(r, c)] * v[c]).sum();
            }
        }
    }
}
