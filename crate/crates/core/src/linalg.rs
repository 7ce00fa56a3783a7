//! Small dense linear-algebra helpers shared by the tensor-network and
//! synthesis code.
//!
//! All decompositions here follow one convention so that downstream circuit
//! construction is deterministic: singular values are sorted in descending
//! order, and each left singular vector is flipped so that its
//! largest-magnitude entry is positive (the matching right singular vector is
//! flipped with it).

use nalgebra::DMatrix;

/// Entries below this are treated as exact zeros when fixing signs.
const SIGN_EPS: f64 = 1e-14;

type Triplet = (DMatrix<f64>, Vec<f64>, DMatrix<f64>);

/// Largest tolerated reconstruction or orthogonality error, relative to the
/// largest entry of the input.
const SVD_CHECK_TOL: f64 = 1e-10;

/// Unsorted thin SVD `(u, s, vt)`.
///
/// Both faer and nalgebra occasionally return inaccurate factors for
/// rank-deficient inputs, each on cases the other handles. Every result is
/// checked and the next backend tried; one-sided Jacobi is the last resort.
pub(crate) fn thin_svd(m: &DMatrix<f64>) -> Triplet {
    let faer_svd = faer_svd(m);
    if faer_svd.as_ref().is_some_and(|t| svd_ok(m, t)) {
        return faer_svd.unwrap();
    }
    let nalgebra_svd = nalgebra_svd(m);
    if svd_ok(m, &nalgebra_svd) {
        return nalgebra_svd;
    }
    jacobi_svd(m)
}

fn faer_svd(m: &DMatrix<f64>) -> Option<Triplet> {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let f = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let svd = f.thin_svd().ok()?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    Some((
        DMatrix::from_fn(rows, k, |i, j| u[(i, j)]),
        (0..k).map(|i| s[i]).collect(),
        DMatrix::from_fn(k, cols, |i, j| v[(j, i)]),
    ))
}

fn nalgebra_svd(m: &DMatrix<f64>) -> Triplet {
    let raw = m.clone().svd(true, true);
    (
        raw.u.expect("u requested"),
        raw.singular_values.iter().copied().collect(),
        raw.v_t.expect("v_t requested"),
    )
}

fn svd_ok(m: &DMatrix<f64>, (u, s, vt): &Triplet) -> bool {
    if s.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let mut back = u.clone();
    for (j, &sj) in s.iter().enumerate() {
        back.column_mut(j).scale_mut(sj);
    }
    let recon = (back * vt - m).amax() / scale;
    recon <= SVD_CHECK_TOL && orthogonality_error(u) <= SVD_CHECK_TOL && orthogonality_error(&vt.transpose()) <= SVD_CHECK_TOL
}

/// One-sided Jacobi SVD. Slow but accurate for every input.
fn jacobi_svd(m: &DMatrix<f64>) -> Triplet {
    if m.nrows() < m.ncols() {
        let (u, s, vt) = jacobi_svd(&m.transpose());
        return (vt.transpose(), s, u.transpose());
    }
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(cols, cols);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let (x, y) = (mat[(i, p)], mat[(i, q)]);
                        mat[(i, p)] = c * x - sn * y;
                        mat[(i, q)] = sn * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let s: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let top = s.iter().copied().fold(0.0, f64::max);
    // columns with negligible norm get an orthonormal completion instead
    let live: Vec<usize> = (0..cols).filter(|&j| s[j] > 1e-300 && s[j] > top * f64::EPSILON * rows as f64).collect();
    let mut partial = DMatrix::zeros(rows, live.len());
    for (dst, &j) in live.iter().enumerate() {
        partial.set_column(dst, &(a.column(j) / s[j]));
    }
    let full = complete_orthonormal(&partial);
    let mut u = DMatrix::zeros(rows, cols);
    let mut spare = live.len();
    for j in 0..cols {
        if let Some(pos) = live.iter().position(|&l| l == j) {
            u.set_column(j, &full.column(pos));
        } else {
            u.set_column(j, &full.column(spare));
            spare += 1;
        }
    }
    (u, s, v.transpose())
}

/// Thin SVD `m = u * diag(s) * vt`, descending and sign-fixed.
pub struct Svd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub vt: DMatrix<f64>,
}

impl Svd {
    pub fn new(m: DMatrix<f64>) -> Self {
        let (rows, cols) = m.shape();
        let k = rows.min(cols);
        let (u_raw, sv, vt_raw) = thin_svd(&m);

        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]).then(a.cmp(&b)));

        let mut u = DMatrix::zeros(rows, k);
        let mut vt = DMatrix::zeros(k, cols);
        let mut s = Vec::with_capacity(k);
        for (dst, &src) in order.iter().enumerate() {
            let col = u_raw.column(src);
            let sign = leading_sign(col.iter().copied());
            u.set_column(dst, &(col * sign));
            vt.set_row(dst, &(vt_raw.row(src) * sign));
            s.push(sv[src].max(0.0));
        }
        Self { u, s, vt }
    }

    /// Keep at most `keep` leading triplets.
    pub fn truncate(&mut self, keep: usize) {
        let keep = keep.min(self.s.len()).max(1);
        self.s.truncate(keep);
        self.u = self.u.columns(0, keep).into_owned();
        self.vt = self.vt.rows(0, keep).into_owned();
    }

    /// Number of singular values above `cutoff * s[0]`.
    pub fn rank(&self, cutoff: f64) -> usize {
        let top = self.s.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 1;
        }
        self.s.iter().filter(|&&v| v > cutoff * top).count().max(1)
    }
}

/// Sign (+1/-1) that makes the largest-magnitude entry positive.
/// Ties go to the lowest index.
pub fn leading_sign(values: impl Iterator<Item = f64>) -> f64 {
    let mut best = 0.0f64;
    for v in values {
        if v.abs() > best.abs() + SIGN_EPS {
            best = v;
        }
    }
    if best < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Maximum absolute deviation of `m^T m` from the identity.
pub fn orthogonality_error(m: &DMatrix<f64>) -> f64 {
    let g = m.transpose() * m;
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// Extend the orthonormal columns of `partial` (dim × k) to a full dim × dim
/// orthogonal matrix.
///
/// Candidates are canonical basis vectors in index order; a candidate is
/// rejected when its residual after projection is below `1e-8`. Each accepted
/// column is normalized and sign-fixed (largest entry positive).
pub fn complete_orthonormal(partial: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = partial.nrows();
    let mut cols: Vec<Vec<f64>> = (0..partial.ncols())
        .map(|j| partial.column(j).iter().copied().collect())
        .collect();
    let mut candidate = 0;
    while cols.len() < dim && candidate < dim {
        let mut v = vec![0.0; dim];
        v[candidate] = 1.0;
        candidate += 1;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for c in &cols {
                let proj: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= proj * ci;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        let sign = leading_sign(v.iter().copied());
        for x in &mut v {
            *x *= sign / norm;
        }
        cols.push(v);
    }
    assert_eq!(cols.len(), dim, "canonical basis spans the space");
    DMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_is_descending_and_sign_fixed() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, -2.0, 0.5, 3.0, -4.0, 1.0]);
        let svd = Svd::new(m.clone());
        assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
        for j in 0..svd.u.ncols() {
            assert_eq!(leading_sign(svd.u.column(j).iter().copied()), 1.0);
        }
        let back = &svd.u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(svd.s.clone())) * &svd.vt;
        assert!((back - m).abs().max() < 1e-12);
    }

    #[test]
    fn jacobi_handles_rank_deficient_input() {
        // rank 2, wide, with an exactly repeated row
        let m = DMatrix::from_row_slice(3, 5, &[1.0, 2.0, 0.0, -1.0, 3.0, 1.0, 2.0, 0.0, -1.0, 3.0, 0.5, 0.0, 4.0, 1.0, -2.0]);
        for t in [jacobi_svd(&m), thin_svd(&m)] {
            assert!(svd_ok(&m, &t));
            assert_eq!(t.1.iter().filter(|&&v| v > 1e-12).count(), 2);
        }
    }

    #[test]
    fn completion_of_single_column() {
        let v = DMatrix::from_column_slice(4, 1, &[0.5, 0.5, 0.5, 0.5]);
        let q = complete_orthonormal(&v);
        assert!(orthogonality_error(&q) < 1e-12);
        assert_eq!(q.column(0), v.column(0));
    }

    #[test]
    fn completion_rejects_dependent_candidates() {
        // first column is e0 itself, so e0 must be skipped as a candidate
        let v = DMatrix::from_column_slice(4, 1, &[1.0, 0.0, 0.0, 0.0]);
        let q = complete_orthonormal(&v);
        assert!(orthogonality_error(&q) < 1e-12);
        assert_eq!(q, DMatrix::identity(4, 4));
    }
}
