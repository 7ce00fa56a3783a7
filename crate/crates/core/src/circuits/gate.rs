use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};

/// Tolerance for accepting a raw matrix as orthogonal.
pub const ORTHOGONAL_TOL: f64 = 1e-10;

/// A real gate acting on one or two qubits.
///
/// `Ry(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`. For [`Gate::U2`] the
/// 4×4 matrix is written in the basis `|q0 q1⟩` with `qubits.0` as the more
/// significant bit; the two qubits must be adjacent.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Ry { qubit: usize, angle: f64 },
    Cx { control: usize, target: usize },
    U1 { qubit: usize, matrix: Matrix2<f64> },
    U2 { qubits: (usize, usize), matrix: Matrix4<f64> },
}

impl Gate {
    pub fn ry(qubit: usize, angle: f64) -> Self {
        Gate::Ry { qubit, angle }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::Cx { control, target }
    }

    /// Raw single-qubit gate; rejected unless orthogonal.
    pub fn u1(qubit: usize, matrix: Matrix2<f64>) -> Result<Self> {
        check_orthogonal2(&matrix)?;
        Ok(Gate::U1 { qubit, matrix })
    }

    /// Raw two-qubit gate on adjacent qubits; rejected unless orthogonal.
    pub fn u2(qubits: (usize, usize), matrix: Matrix4<f64>) -> Result<Self> {
        if qubits.0.abs_diff(qubits.1) != 1 {
            return Err(Error::NonAdjacent(qubits.0, qubits.1));
        }
        check_orthogonal4(&matrix)?;
        Ok(Gate::U2 { qubits, matrix })
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Ry { qubit, .. } | Gate::U1 { qubit, .. } => vec![qubit],
            Gate::Cx { control, target } => vec![control, target],
            Gate::U2 { qubits, .. } => vec![qubits.0, qubits.1],
        }
    }

    pub fn is_raw(&self) -> bool {
        matches!(self, Gate::U1 { .. } | Gate::U2 { .. })
    }

    pub fn inverse(&self) -> Self {
        match self {
            Gate::Ry { qubit, angle } => Gate::Ry {
                qubit: *qubit,
                angle: -angle,
            },
            Gate::Cx { .. } => self.clone(),
            Gate::U1 { qubit, matrix } => Gate::U1 {
                qubit: *qubit,
                matrix: matrix.transpose(),
            },
            Gate::U2 { qubits, matrix } => Gate::U2 {
                qubits: *qubits,
                matrix: matrix.transpose(),
            },
        }
    }

    /// Single-qubit matrix for `Ry`/`U1` gates.
    pub fn matrix2(&self) -> Option<Matrix2<f64>> {
        match self {
            Gate::Ry { angle, .. } => Some(ry_matrix(*angle)),
            Gate::U1 { matrix, .. } => Some(*matrix),
            _ => None,
        }
    }

    /// Two-qubit matrix for `Cx`/`U2` gates, expressed on `(lo, hi)` with
    /// `lo < hi` and `lo` as the more significant bit.
    pub fn matrix4_ordered(&self) -> Option<((usize, usize), Matrix4<f64>)> {
        match self {
            Gate::Cx { control, target } => {
                if control < target {
                    Some(((*control, *target), cx_matrix()))
                } else {
                    Some(((*target, *control), swap_conjugate(&cx_matrix())))
                }
            }
            Gate::U2 { qubits, matrix } => {
                if qubits.0 < qubits.1 {
                    Some((*qubits, *matrix))
                } else {
                    Some(((qubits.1, qubits.0), swap_conjugate(matrix)))
                }
            }
            _ => None,
        }
    }
}

pub fn ry_matrix(angle: f64) -> Matrix2<f64> {
    let (s, c) = (angle / 2.0).sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// CX with control on the more significant qubit.
pub fn cx_matrix() -> Matrix4<f64> {
    Matrix4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, 1.0, 0.0,
    )
}

fn swap_matrix() -> Matrix4<f64> {
    Matrix4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    )
}

/// Re-express a two-qubit matrix with its qubit order swapped.
pub fn swap_conjugate(m: &Matrix4<f64>) -> Matrix4<f64> {
    let s = swap_matrix();
    s * m * s
}

fn check_orthogonal2(m: &Matrix2<f64>) -> Result<()> {
    let dev = (m.transpose() * m - Matrix2::identity()).abs().max();
    if dev > ORTHOGONAL_TOL || !dev.is_finite() {
        return Err(Error::NotOrthogonal(dev));
    }
    Ok(())
}

pub(crate) fn check_orthogonal4(m: &Matrix4<f64>) -> Result<()> {
    let dev = (m.transpose() * m - Matrix4::identity()).abs().max();
    if dev > ORTHOGONAL_TOL || !dev.is_finite() {
        return Err(Error::NotOrthogonal(dev));
    }
    Ok(())
}
