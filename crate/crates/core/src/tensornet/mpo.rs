use nalgebra::{DMatrix, Matrix2, Matrix4};

use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::linalg::Svd;

/// Default relative cutoff for MPO recompression.
pub const DEFAULT_SVD_CUTOFF: f64 = 1e-12;

/// Largest register accepted by [`circuit_to_mpo`].
pub const MAX_MPO_QUBITS: usize = 14;

/// One MPO site `W[left, out, in, right]`, row-major in that index order.
#[derive(Clone, Debug, PartialEq)]
pub struct MpoSite {
    left: usize,
    right: usize,
    data: Vec<f64>,
}

impl MpoSite {
    fn identity() -> Self {
        Self {
            left: 1,
            right: 1,
            data: vec![1.0, 0.0, 0.0, 1.0],
        }
    }

    #[inline]
    fn idx(&self, l: usize, o: usize, i: usize, r: usize) -> usize {
        ((l * 2 + o) * 2 + i) * self.right + r
    }

    pub fn get(&self, l: usize, o: usize, i: usize, r: usize) -> f64 {
        self.data[self.idx(l, o, i, r)]
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.left, self.right)
    }
}

/// Operator in matrix-product form with open boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct Mpo {
    sites: Vec<MpoSite>,
}

impl Mpo {
    pub fn identity(n: usize) -> Self {
        Self {
            sites: vec![MpoSite::identity(); n],
        }
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[MpoSite] {
        &self.sites
    }

    /// Virtual bond dimensions; empty for a single site.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.sites.len().saturating_sub(1)]
            .iter()
            .map(|s| s.right)
            .collect()
    }

    pub fn max_bond_dim(&self) -> Option<usize> {
        self.bond_dims().into_iter().max()
    }

    /// Left-multiply by a single-qubit matrix on `q`.
    fn apply_one(&mut self, q: usize, g: &Matrix2<f64>) {
        let site = &mut self.sites[q];
        let (left, right) = (site.left, site.right);
        let mut out = vec![0.0; site.data.len()];
        for l in 0..left {
            for o in 0..2 {
                for i in 0..2 {
                    for r in 0..right {
                        let v = g[(o, 0)] * site.get(l, 0, i, r) + g[(o, 1)] * site.get(l, 1, i, r);
                        out[site.idx(l, o, i, r)] = v;
                    }
                }
            }
        }
        site.data = out;
    }

    /// Left-multiply by a two-qubit matrix on `(q, q+1)` and recompress.
    fn apply_two(&mut self, q: usize, g: &Matrix4<f64>, cutoff: f64) {
        let (a, b) = (&self.sites[q], &self.sites[q + 1]);
        let (left, mid, right) = (a.left, a.right, b.right);

        // θ[(l,o1,i1), (o2,i2,r)] after the gate
        let rows = left * 4;
        let cols = 4 * right;
        let mut theta = vec![0.0; rows * cols];
        for l in 0..left {
            for i1 in 0..2 {
                for i2 in 0..2 {
                    for r in 0..right {
                        // contracted block over the output pair
                        let mut blk = [0.0; 4];
                        for (op, slot) in blk.iter_mut().enumerate() {
                            let (o1, o2) = (op >> 1, op & 1);
                            *slot = (0..mid).map(|m| a.get(l, o1, i1, m) * b.get(m, o2, i2, r)).sum();
                        }
                        for o1 in 0..2 {
                            for o2 in 0..2 {
                                let row = (l * 2 + o1) * 2 + i1;
                                let col = (o2 * 2 + i2) * right + r;
                                let v: f64 = (0..4).map(|c| g[(o1 * 2 + o2, c)] * blk[c]).sum();
                                theta[row * cols + col] = v;
                            }
                        }
                    }
                }
            }
        }
        let mut svd = Svd::new(DMatrix::from_row_slice(rows, cols, &theta));
        let keep = svd.rank(cutoff);
        svd.truncate(keep);

        let mut left_site = MpoSite {
            left,
            right: keep,
            data: vec![0.0; rows * keep],
        };
        for row in 0..rows {
            for k in 0..keep {
                left_site.data[row * keep + k] = svd.u[(row, k)];
            }
        }
        let mut right_site = MpoSite {
            left: keep,
            right,
            data: vec![0.0; keep * cols],
        };
        for k in 0..keep {
            for col in 0..cols {
                right_site.data[k * cols + col] = svd.s[k] * svd.vt[(k, col)];
            }
        }
        self.sites[q] = left_site;
        self.sites[q + 1] = right_site;
    }

    /// Left-canonicalize, then truncate right to left. Local recompression
    /// works on non-canonical neighbors, so rounding noise can survive it;
    /// this sweep leaves every bond at its true operator Schmidt rank.
    fn compress(&mut self, cutoff: f64) {
        let n = self.sites.len();
        for q in 0..n.saturating_sub(1) {
            let site = &self.sites[q];
            let (rows, right) = (site.left * 4, site.right);
            let mut svd = Svd::new(DMatrix::from_row_slice(rows, right, &site.data));
            // drop only exact zeros here; the truncation happens on the way back
            let keep = svd.s.iter().filter(|&&v| v > 0.0).count().max(1);
            svd.truncate(keep);
            self.sites[q].right = keep;
            self.sites[q].data = (0..rows * keep).map(|x| svd.u[(x / keep, x % keep)]).collect();
            let sv = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(svd.s)) * svd.vt;
            self.absorb_left(q + 1, &sv);
        }
        for q in (1..n).rev() {
            let site = &self.sites[q];
            let (left, cols) = (site.left, 4 * site.right);
            let mut svd = Svd::new(DMatrix::from_row_slice(left, cols, &site.data));
            let keep = svd.rank(cutoff);
            svd.truncate(keep);
            self.sites[q].left = keep;
            self.sites[q].data = (0..keep * cols).map(|x| svd.vt[(x / cols, x % cols)]).collect();
            let us = svd.u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(svd.s));
            self.absorb_right(q - 1, &us);
        }
    }

    /// Replace site `q` by `m · W`, contracting `m` into its left bond.
    fn absorb_left(&mut self, q: usize, m: &DMatrix<f64>) {
        let site = &self.sites[q];
        let cols = 4 * site.right;
        let w = DMatrix::from_row_slice(site.left, cols, &site.data);
        let out = m * w;
        self.sites[q].left = out.nrows();
        self.sites[q].data = (0..out.nrows() * cols).map(|x| out[(x / cols, x % cols)]).collect();
    }

    /// Replace site `q` by `W · m`, contracting `m` into its right bond.
    fn absorb_right(&mut self, q: usize, m: &DMatrix<f64>) {
        let site = &self.sites[q];
        let rows = site.left * 4;
        let w = DMatrix::from_row_slice(rows, site.right, &site.data);
        let out = w * m;
        let right = out.ncols();
        self.sites[q].right = right;
        self.sites[q].data = (0..rows * right).map(|x| out[(x / right, x % right)]).collect();
    }

    /// Dense `2^n × 2^n` operator.
    pub fn to_dense(&self, max_qubits: usize) -> Result<DMatrix<f64>> {
        let n = self.sites.len();
        if n > max_qubits {
            return Err(Error::TooLarge { n, max: max_qubits });
        }
        // t[(out, in, bond)] with out/in over the sites seen so far
        let mut dim = 1usize;
        let mut chi = 1usize;
        let mut t = vec![1.0];
        for s in &self.sites {
            let nd = dim * 2;
            let mut next = vec![0.0; nd * nd * s.right];
            for out in 0..dim {
                for inp in 0..dim {
                    for l in 0..chi {
                        let x = t[(out * dim + inp) * chi + l];
                        if x == 0.0 {
                            continue;
                        }
                        for o in 0..2 {
                            for i in 0..2 {
                                for r in 0..s.right {
                                    let pos = ((out * 2 + o) * nd + inp * 2 + i) * s.right + r;
                                    next[pos] += x * s.get(l, o, i, r);
                                }
                            }
                        }
                    }
                }
            }
            t = next;
            dim = nd;
            chi = s.right;
        }
        Ok(DMatrix::from_row_slice(dim, dim, &t))
    }
}

/// Run `circuit` on an identity MPO, recompressing after every two-qubit gate
/// and dropping singular values below `svd_cutoff` times the largest.
pub fn circuit_to_mpo(circuit: &Circuit, svd_cutoff: f64) -> Result<Mpo> {
    let n = circuit.n_qubits();
    if n > MAX_MPO_QUBITS {
        return Err(Error::TooLarge {
            n,
            max: MAX_MPO_QUBITS,
        });
    }
    let mut mpo = Mpo::identity(n);
    for g in circuit.gates() {
        if let Some(m) = g.matrix2() {
            mpo.apply_one(g.qubits()[0], &m);
            continue;
        }
        let ((lo, hi), m) = g.matrix4_ordered().expect("two-qubit gate");
        if hi != lo + 1 {
            return Err(Error::NonAdjacent(lo, hi));
        }
        mpo.apply_two(lo, &m, svd_cutoff);
    }
    mpo.compress(svd_cutoff);
    Ok(mpo)
}
