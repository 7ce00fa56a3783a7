use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::Svd;
use crate::targets::Statevector;

/// Singular values at or below this are dropped from an exact decomposition.
const RANK_EPS: f64 = 1e-14;

/// Default ceiling for dense contraction.
pub const DEFAULT_MAX_QUBITS: usize = 20;

/// Open-boundary MPS in left-canonical form.
///
/// Site `k` is stored as a `(χ_{k−1}·2) × χ_k` matrix with row index
/// `left·2 + physical`; the outer bonds have dimension 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Mps {
    sites: Vec<DMatrix<f64>>,
    discarded: Vec<f64>,
}

/// Singular values at every bond, largest first.
#[derive(Clone, Debug, PartialEq)]
pub struct BondSpectra {
    spectra: Vec<Vec<f64>>,
}

impl BondSpectra {
    pub fn new(spectra: Vec<Vec<f64>>) -> Self {
        Self { spectra }
    }

    pub fn n_bonds(&self) -> usize {
        self.spectra.len()
    }

    pub fn bond(&self, k: usize) -> Result<&[f64]> {
        self.spectra
            .get(k)
            .map(Vec::as_slice)
            .ok_or(Error::BondOutOfRange {
                k,
                bonds: self.spectra.len(),
            })
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.spectra.iter().map(Vec::as_slice)
    }

    /// Number of singular values above `1e-12` at each bond.
    pub fn support(&self) -> Vec<usize> {
        self.spectra
            .iter()
            .map(|s| s.iter().filter(|&&v| v > super::ZERO_SV).count())
            .collect()
    }
}

impl Mps {
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[DMatrix<f64>] {
        &self.sites
    }

    /// `χ_1 … χ_{N−1}`.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.sites.len() - 1]
            .iter()
            .map(|s| s.ncols())
            .collect()
    }

    /// Squared weight cut at each bond during the sweep that built this MPS.
    pub fn discarded_weights(&self) -> &[f64] {
        &self.discarded
    }

    /// Site tensor entry `A[left, physical, right]`.
    pub fn entry(&self, site: usize, left: usize, physical: usize, right: usize) -> f64 {
        self.sites[site][(left * 2 + physical, right)]
    }

    /// Build an MPS directly from site matrices, checking bond agreement.
    pub fn from_sites(sites: Vec<DMatrix<f64>>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidTarget("MPS needs at least one site".into()));
        }
        let mut left = 1;
        for (k, s) in sites.iter().enumerate() {
            if s.nrows() != left * 2 {
                return Err(Error::DimensionMismatch {
                    expected: left * 2,
                    got: s.nrows(),
                });
            }
            left = s.ncols();
            if k + 1 == sites.len() && left != 1 {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    got: left,
                });
            }
        }
        let discarded = vec![0.0; sites.len() - 1];
        Ok(Self { sites, discarded })
    }

    /// Largest deviation from left-orthonormality over all but the last site.
    pub fn left_canonical_error(&self) -> f64 {
        self.sites[..self.sites.len() - 1]
            .iter()
            .map(crate::linalg::orthogonality_error)
            .fold(0.0, f64::max)
    }
}

/// Left-to-right SVD sweep.
///
/// With `chi_max` each bond keeps at most that many singular values; the
/// returned spectra always describe the untruncated state.
pub fn to_mps(state: &Statevector, chi_max: Option<usize>) -> Result<(Mps, BondSpectra)> {
    if chi_max == Some(0) {
        return Err(Error::Config("chi_max must be positive".into()));
    }
    let (mps, spectra) = sweep(state.n_qubits(), state.amplitudes(), chi_max);
    let spectra = match chi_max {
        None => spectra,
        Some(_) => spectra_of(state.n_qubits(), state.amplitudes()),
    };
    Ok((mps, BondSpectra::new(spectra)))
}

/// Exact bond spectra of `state`.
pub fn bond_spectra(state: &Statevector) -> BondSpectra {
    BondSpectra::new(spectra_of(state.n_qubits(), state.amplitudes()))
}

/// Spectra of a raw amplitude buffer of length `2^n`.
pub(crate) fn spectra_of(n: usize, amps: &[f64]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    if n < 2 {
        return out;
    }
    let mut rest = DMatrix::from_row_slice(2, amps.len() / 2, amps);
    for _ in 0..n - 1 {
        let (_, mut s, vt) = crate::linalg::thin_svd(&rest);
        // only singular values are needed; carry S·Vᵀ forward
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
        let keep = order.iter().filter(|&&i| s[i] > RANK_EPS).count().max(1);
        let cols = rest.ncols() / 2;
        rest = DMatrix::from_fn(keep * 2, cols, |row, col| {
            let (a, p) = (row / 2, row % 2);
            let i = order[a];
            s[i] * vt[(i, p * cols + col)]
        });
        s.sort_by(|a, b| b.total_cmp(a));
        out.push(s);
    }
    out
}

fn sweep(n: usize, amps: &[f64], chi_max: Option<usize>) -> (Mps, Vec<Vec<f64>>) {
    if n == 1 {
        let site = DMatrix::from_column_slice(2, 1, amps);
        return (
            Mps {
                sites: vec![site],
                discarded: Vec::new(),
            },
            Vec::new(),
        );
    }
    let mut sites = Vec::with_capacity(n);
    let mut spectra = Vec::with_capacity(n - 1);
    let mut discarded = Vec::with_capacity(n - 1);
    let mut rest = DMatrix::from_row_slice(2, amps.len() / 2, amps);
    for _ in 0..n - 1 {
        let mut svd = Svd::new(rest.clone());
        let rank = svd.s.iter().filter(|&&v| v > RANK_EPS).count().max(1);
        let keep = chi_max.map_or(rank, |c| c.min(rank));
        discarded.push(svd.s[keep..].iter().map(|v| v * v).sum());
        spectra.push(svd.s.clone());
        svd.truncate(keep);
        let cols = rest.ncols() / 2;
        let sv = &svd.s;
        let vt = &svd.vt;
        rest = DMatrix::from_fn(keep * 2, cols, |row, col| {
            let (a, p) = (row / 2, row % 2);
            sv[a] * vt[(a, p * cols + col)]
        });
        sites.push(svd.u);
    }
    sites.push(rest);
    (Mps { sites, discarded }, spectra)
}

/// Dense contraction; not renormalized.
pub fn mps_to_statevector(mps: &Mps, max_qubits: usize) -> Result<Statevector> {
    let n = mps.n_sites();
    if n > max_qubits {
        return Err(Error::TooLarge { n, max: max_qubits });
    }
    // v: 2^k × χ_k, rows are the basis indices of the first k qubits
    let mut v = DMatrix::from_element(1, 1, 1.0);
    for site in &mps.sites {
        let chi_l = site.nrows() / 2;
        let chi_r = site.ncols();
        let mut next = DMatrix::zeros(v.nrows() * 2, chi_r);
        for p in 0..2 {
            let slice = DMatrix::from_fn(chi_l, chi_r, |l, r| site[(l * 2 + p, r)]);
            let part = &v * slice;
            for i in 0..v.nrows() {
                next.row_mut(i * 2 + p).copy_from(&part.row(i));
            }
        }
        v = next;
    }
    Statevector::new(n, v.column(0).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    /// |Φ+⟩ on qubits {0,2} and {1,3}.
    fn crossed_bells() -> Statevector {
        let mut amps = vec![0.0; 16];
        for a in 0..2 {
            for b in 0..2 {
                amps[(a << 3) | (b << 2) | (a << 1) | b] = 0.5;
            }
        }
        Statevector::new(4, amps).unwrap()
    }

    /// Brute-force singular values of the `2^k × 2^(n−k)` reshaping.
    fn reshaped_singular_values(state: &Statevector, k: usize) -> Vec<f64> {
        let n = state.n_qubits();
        let m = DMatrix::from_row_slice(1 << k, 1 << (n - k), state.amplitudes());
        let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    #[test]
    fn product_state_has_unit_bonds() {
        let (mps, spectra) = to_mps(&Statevector::zero(3), None).unwrap();
        assert_eq!(mps.bond_dims(), vec![1, 1]);
        for s in spectra.iter() {
            assert!((s[0] - 1.0).abs() < 1e-15);
            assert!(s[1..].iter().all(|&v| v < 1e-15));
        }
    }

    #[test]
    fn crossed_bells_middle_spectrum() {
        let psi = crossed_bells();
        assert_eq!(reshaped_singular_values(&psi, 2), vec![0.5; 4]);
        let (_, spectra) = to_mps(&psi, None).unwrap();
        for (got, want) in spectra.bond(1).unwrap().iter().zip([0.5; 4]) {
            assert!((got - want).abs() < 1e-12);
        }
        for k in [0, 2] {
            for v in &spectra.bond(k).unwrap()[..2] {
                assert!((v - FRAC_1_SQRT_2).abs() < 1e-12);
            }
        }
        assert!(spectra.bond(3).is_err());
    }

    #[test]
    fn round_trip_exact() {
        let psi = Statevector::normalized(5, (0..32).map(|i| ((i * 7 % 11) as f64) - 4.5).collect()).unwrap();
        let (mps, spectra) = to_mps(&psi, None).unwrap();
        assert!(mps.left_canonical_error() < 1e-10);
        let back = mps_to_statevector(&mps, DEFAULT_MAX_QUBITS).unwrap();
        assert!(psi.distance(&back) < 1e-12);
        for k in 0..4 {
            let brute = reshaped_singular_values(&psi, k + 1);
            let got = spectra.bond(k).unwrap();
            for (a, b) in brute.iter().zip(got) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectra_only_path_matches_sweep() {
        let psi = Statevector::normalized(6, (0..64).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap();
        let (_, a) = to_mps(&psi, None).unwrap();
        let b = bond_spectra(&psi);
        for (x, y) in a.iter().zip(b.iter()) {
            for (u, v) in x.iter().zip(y) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn truncated_spectra_are_exact_ones() {
        let psi = crossed_bells();
        let (mps, spectra) = to_mps(&psi, Some(2)).unwrap();
        assert_eq!(mps.bond_dims(), vec![2, 2, 2]);
        assert_eq!(spectra.bond(1).unwrap().len(), 4);
        let back = mps_to_statevector(&mps, DEFAULT_MAX_QUBITS).unwrap();
        assert!((back.norm().powi(2) - 0.5).abs() < 1e-12);
        assert!((mps.discarded_weights()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_site() {
        let mps = Mps::from_sites(vec![DMatrix::from_column_slice(2, 1, &[1.0, 0.0])]).unwrap();
        assert_eq!(mps_to_statevector(&mps, 4).unwrap(), Statevector::zero(1));
    }

    #[test]
    fn contraction_limit() {
        let (mps, _) = to_mps(&Statevector::zero(6), None).unwrap();
        assert!(matches!(
            mps_to_statevector(&mps, 5),
            Err(Error::TooLarge { n: 6, max: 5 })
        ));
    }

    #[test]
    fn from_sites_checks_bonds() {
        let bad = vec![DMatrix::zeros(2, 2), DMatrix::zeros(2, 1)];
        assert!(Mps::from_sites(bad).is_err());
        assert!(to_mps(&Statevector::zero(2), Some(0)).is_err());
    }
}
