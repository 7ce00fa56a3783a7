//! Synthesis of raw real-orthogonal gates into `{ry, cx}`.
//!
//! Two-qubit gates go through the real "magic" basis `P`, in which
//! `Ry(a) ⊗ Ry(b)` becomes block-diagonal `R((b−a)/2) ⊕ R((a+b)/2)` and
//! `CX·(Ry(c) ⊗ Ry(d))·CX` becomes (up to a fixed conjugation) a pair of plane
//! rotations. A 2+2 cosine–sine decomposition of `Pᵀ O P` therefore yields an
//! `Ry⊗Ry – CX – Ry⊗Ry – CX – Ry⊗Ry` circuit for any `O ∈ SO(4)`. Inputs with
//! determinant −1 get one extra CX.
//!
//! The emitted gates reproduce the input exactly, including its sign.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2};

use super::circuit::Circuit;
use super::gate::{check_orthogonal4, cx_matrix, Gate};
use crate::error::{Error, Result};

/// Angles closer than this to a multiple of 4π are dropped.
const ANGLE_EPS: f64 = 1e-12;
/// Maximum entry-wise error accepted from the decomposition.
const RECON_TOL: f64 = 1e-9;

/// Rewrite every raw gate of `circuit` into `ry`/`cx` gates.
pub fn synthesize(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.n_qubits());
    for g in circuit.gates() {
        match g {
            Gate::U1 { qubit, matrix } => {
                for h in synthesize_single_qubit(*qubit, matrix)? {
                    out.push(h)?;
                }
            }
            Gate::U2 { .. } => {
                let ((lo, hi), m) = g.matrix4_ordered().expect("two-qubit gate");
                for h in synthesize_two_qubit(lo, hi, &m)? {
                    out.push(h)?;
                }
            }
            other => out.push(other.clone())?,
        }
    }
    Ok(out)
}

/// A proper rotation `[[c, −s], [s, c]]` is exactly one `Ry`.
pub fn synthesize_single_qubit(qubit: usize, m: &Matrix2<f64>) -> Result<Vec<Gate>> {
    let dev = (m.transpose() * m - Matrix2::identity()).abs().max();
    if !(dev <= 1e-10) {
        return Err(Error::NotOrthogonal(dev));
    }
    if m.determinant() < 0.0 {
        return Err(Error::ImproperSingleQubit);
    }
    let angle = wrap(2.0 * rotation_angle(m));
    if angle.abs() < ANGLE_EPS {
        return Ok(Vec::new());
    }
    Ok(vec![Gate::ry(qubit, angle)])
}

/// Decompose a 4×4 orthogonal matrix acting on `(lo, hi)` into `ry`/`cx`
/// gates. `lo` is the more significant bit of the matrix basis.
///
/// Uses at most three CX; a generic `SO(4)` element takes exactly two.
pub fn synthesize_two_qubit(lo: usize, hi: usize, m: &Matrix4<f64>) -> Result<Vec<Gate>> {
    check_orthogonal4(m)?;
    let mut gates = Vec::new();
    let proper = if m.determinant() < 0.0 {
        // m = (m·CX)·CX: the CX acts first
        gates.push(Gate::cx(lo, hi));
        m * cx_matrix()
    } else {
        *m
    };
    gates.extend(synthesize_so4(lo, hi, &proper)?);

    let rebuilt = gates_matrix(lo, hi, &gates);
    let err = (rebuilt - m).abs().max();
    if !(err <= RECON_TOL) {
        return Err(Error::SynthesisFailed(err));
    }
    Ok(gates)
}

fn synthesize_so4(lo: usize, hi: usize, o: &Matrix4<f64>) -> Result<Vec<Gate>> {
    let p = magic();
    let q = p.transpose() * o * p;
    let (kl, kr) = cosine_sine(&q);

    let mid = kl.transpose() * q * kr;
    let t1 = mid[(2, 0)].atan2(mid[(0, 0)]);
    let t2 = mid[(3, 1)].atan2(mid[(1, 1)]);
    let c = wrap(t2 - t1);
    let d = wrap(t1 + t2);

    let mut gates = Vec::new();
    if c.abs() < ANGLE_EPS && d.abs() < ANGLE_EPS {
        // no entangling part: merge both local layers into one
        push_local(&mut gates, lo, hi, &(kl * kr.transpose()));
        return Ok(gates);
    }
    let kc = block_diag(&rot(-FRAC_PI_4), &rot(FRAC_PI_4));
    push_local(&mut gates, lo, hi, &(kc * kr.transpose()));
    gates.push(Gate::cx(lo, hi));
    push_ry(&mut gates, lo, c);
    push_ry(&mut gates, hi, d);
    gates.push(Gate::cx(lo, hi));
    push_local(&mut gates, lo, hi, &(kl * kc.transpose()));
    Ok(gates)
}

/// `Q = Kl · Mid · Krᵀ` with `Kl`, `Kr` block-diagonal `SO(2) ⊕ SO(2)` and
/// `Mid` rotating the planes `(e0, e2)` and `(e1, e3)`.
fn cosine_sine(q: &Matrix4<f64>) -> (Matrix4<f64>, Matrix4<f64>) {
    let q11 = block(q, 0, 0);
    let q12 = block(q, 0, 2);
    let q21 = block(q, 2, 0);
    let q22 = block(q, 2, 2);

    let (u1, cs, v1) = svd2(&q11);
    let c = Matrix2::from_diagonal(&cs);
    let s = Matrix2::from_diagonal(&cs.map(|x| (1.0 - x * x).max(0.0).sqrt()));

    // Q21·V1 = U2·S; the second column carries the larger sine
    let z = q21 * v1;
    let z2 = z.column(1).into_owned();
    let u2 = if z2.norm() > 1e-9 {
        let col2 = z2 / z2.norm();
        let mut col1 = Vector2::new(col2.y, -col2.x);
        if col1.dot(&z.column(0)) < 0.0 {
            col1 = -col1;
        }
        Matrix2::from_columns(&[col1, col2])
    } else {
        Matrix2::identity()
    };

    // Q12 = −U1·S·V2ᵀ and Q22 = U2·C·V2ᵀ, blended for stability
    let v2t = polar(&(-s * u1.transpose() * q12 + c * u2.transpose() * q22));
    let v2 = v2t.transpose();

    let kl = block_diag(&proper(u1), &proper(u2));
    let kr = block_diag(&proper(v1), &proper(v2));
    (kl, kr)
}

/// Flip the second column of an improper 2×2 orthogonal matrix.
fn proper(m: Matrix2<f64>) -> Matrix2<f64> {
    if m.determinant() < 0.0 {
        Matrix2::new(m[(0, 0)], -m[(0, 1)], m[(1, 0)], -m[(1, 1)])
    } else {
        m
    }
}

/// SVD of a 2×2 matrix with singular values in descending order.
fn svd2(m: &Matrix2<f64>) -> (Matrix2<f64>, Vector2<f64>, Matrix2<f64>) {
    let (u, s, vt) = crate::linalg::thin_svd(&DMatrix::from_fn(2, 2, |i, j| m[(i, j)]));
    let u = Matrix2::from_fn(|i, j| u[(i, j)]);
    let v = Matrix2::from_fn(|i, j| vt[(j, i)]);
    let s = Vector2::new(s[0], s[1]);
    if s[0] >= s[1] {
        (u, s, v)
    } else {
        let sw = |a: Matrix2<f64>| Matrix2::from_columns(&[a.column(1), a.column(0)]);
        (sw(u), Vector2::new(s[1], s[0]), sw(v))
    }
}

/// Nearest orthogonal matrix.
fn polar(m: &Matrix2<f64>) -> Matrix2<f64> {
    let (u, _, v) = svd2(m);
    u * v.transpose()
}

/// Emit `Ry(a) ⊗ Ry(b)` for a block-diagonal matrix in the magic basis.
fn push_local(gates: &mut Vec<Gate>, lo: usize, hi: usize, k: &Matrix4<f64>) {
    let alpha = rotation_angle(&block(k, 0, 0));
    let beta = rotation_angle(&block(k, 2, 2));
    push_ry(gates, lo, wrap(beta - alpha));
    push_ry(gates, hi, wrap(alpha + beta));
}

fn push_ry(gates: &mut Vec<Gate>, q: usize, angle: f64) {
    if angle.abs() >= ANGLE_EPS {
        gates.push(Gate::ry(q, angle));
    }
}

/// Angle φ of `[[cos φ, −sin φ], [sin φ, cos φ]]`.
fn rotation_angle(m: &Matrix2<f64>) -> f64 {
    m[(1, 0)].atan2(m[(0, 0)])
}

/// Reduce a rotation angle into `(−2π, 2π]`; `Ry` has period 4π.
fn wrap(x: f64) -> f64 {
    let period = 4.0 * PI;
    let r = x - period * (x / period).round();
    if r <= -2.0 * PI {
        r + period
    } else {
        r
    }
}

fn rot(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Columns `(e0+e3)/√2, (e1−e2)/√2, (e0−e3)/√2, (e1+e2)/√2`.
fn magic() -> Matrix4<f64> {
    let r = FRAC_1_SQRT_2;
    Matrix4::new(
        r, 0.0, r, 0.0, //
        0.0, r, 0.0, r, //
        0.0, -r, 0.0, r, //
        r, 0.0, -r, 0.0,
    )
}

fn block(m: &Matrix4<f64>, r: usize, c: usize) -> Matrix2<f64> {
    m.fixed_view::<2, 2>(r, c).into_owned()
}

fn block_diag(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(b);
    m
}

/// 4×4 matrix of a gate list on `(lo, hi)`, `lo` as the more significant bit.
fn gates_matrix(lo: usize, hi: usize, gates: &[Gate]) -> Matrix4<f64> {
    let relabel = |q: usize| if q == lo { 0 } else { debug_assert_eq!(q, hi); 1 };
    let mut c = Circuit::new(2);
    for g in gates {
        let h = match *g {
            Gate::Ry { qubit, angle } => Gate::ry(relabel(qubit), angle),
            Gate::Cx { control, target } => Gate::cx(relabel(control), relabel(target)),
            _ => unreachable!("synthesis emits only ry/cx"),
        };
        c.push(h).expect("two-qubit register");
    }
    let u = c.unitary();
    Matrix4::from_fn(|i, j| u[(i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::gate::swap_conjugate;

    fn cx_count(gates: &[Gate]) -> usize {
        gates.iter().filter(|g| matches!(g, Gate::Cx { .. })).count()
    }

    #[test]
    fn identity_is_empty() {
        let g = synthesize_two_qubit(0, 1, &Matrix4::identity()).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn cx_is_one_cx() {
        let g = synthesize_two_qubit(0, 1, &cx_matrix()).unwrap();
        assert_eq!(g, vec![Gate::cx(0, 1)]);
    }

    #[test]
    fn reversed_cx_takes_at_most_three() {
        let m = swap_conjugate(&cx_matrix());
        let g = synthesize_two_qubit(3, 4, &m).unwrap();
        assert!(cx_count(&g) <= 3);
    }

    #[test]
    fn local_product_needs_no_cx() {
        let m = crate::circuits::gate::ry_matrix(0.4).kronecker(&crate::circuits::gate::ry_matrix(-1.3));
        let g = synthesize_two_qubit(0, 1, &m).unwrap();
        assert_eq!(cx_count(&g), 0);
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn negative_identity_keeps_sign() {
        let g = synthesize_two_qubit(0, 1, &(-Matrix4::identity())).unwrap();
        assert_eq!(cx_count(&g), 0);
        assert!((gates_matrix(0, 1, &g) + Matrix4::identity()).abs().max() < 1e-12);
    }

    #[test]
    fn rejects_non_orthogonal() {
        let m = Matrix4::identity() * 2.0;
        assert!(matches!(
            synthesize_two_qubit(0, 1, &m),
            Err(Error::NotOrthogonal(_))
        ));
    }

    #[test]
    fn single_qubit_rotation() {
        let m = crate::circuits::gate::ry_matrix(1.1);
        assert_eq!(synthesize_single_qubit(2, &m).unwrap(), vec![Gate::ry(2, 1.1)]);
        let refl = Matrix2::new(1.0, 0.0, 0.0, -1.0);
        assert!(matches!(
            synthesize_single_qubit(0, &refl),
            Err(Error::ImproperSingleQubit)
        ));
    }

    #[test]
    fn wrap_range() {
        for x in [-13.0, -2.0 * PI, 0.0, 2.0 * PI, 7.0, 40.0] {
            let w = wrap(x);
            assert!(w > -2.0 * PI - 1e-15 && w <= 2.0 * PI + 1e-15);
            assert!(((x - w) / (4.0 * PI)).fract().abs() < 1e-12
                || (1.0 - ((x - w) / (4.0 * PI)).fract().abs()) < 1e-12);
        }
    }
}
