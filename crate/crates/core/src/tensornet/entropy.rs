use nalgebra::{DMatrixView, SymmetricEigen};

use super::mps::BondSpectra;
use super::ZERO_SV;
use crate::error::Result;

/// Von Neumann entropy of bond `k` (0-based) in bits.
pub fn bond_entropy(spectra: &BondSpectra, k: usize) -> Result<f64> {
    Ok(entropy_terms(spectra.bond(k)?.iter()))
}

/// Entropy carried by everything beyond the two leading singular values,
/// summed over all bonds. Zero exactly when every bond fits in `χ = 2`.
pub fn cumulative_ee(spectra: &BondSpectra) -> f64 {
    // fold from +0.0; an empty f64 sum is -0.0
    spectra.iter().map(|s| entropy_terms(s.iter().skip(2))).fold(0.0, |a, b| a + b)
}

/// Sum of all singular values beyond the two leading ones, over all bonds.
pub fn sparse_ee_loss(spectra: &BondSpectra) -> f64 {
    spectra
        .iter()
        .map(|s| s.iter().skip(2).filter(|&&v| v > ZERO_SV).sum::<f64>())
        .fold(0.0, |a, b| a + b)
}

/// `√(Σ_bonds max(0, 1 − Σ_{j≤keep} Λ_j²))`: upper bound on the error of
/// keeping `keep` singular values per bond.
pub fn truncation_bound(spectra: &BondSpectra, keep: usize) -> f64 {
    spectra
        .iter()
        .map(|s| (1.0 - s.iter().take(keep).map(|v| v * v).sum::<f64>()).max(0.0))
        .sum::<f64>()
        .sqrt()
}

/// Gram eigenvalues below this are rounding noise.
const GRAM_FLOOR: f64 = 1e-14;

/// Cumulative entropy of a raw amplitude buffer from the eigenvalues of the
/// reduced density matrix on the smaller side of every cut. Much cheaper than
/// the SVD sweep; used inside the training loop.
///
/// Eigenvalues carry absolute rounding error near 1e-16, so anything below
/// [`GRAM_FLOOR`] is dropped; each dropped term is worth less than 5e-13.
pub(crate) fn cumulative_ee_gram(n: usize, amps: &[f64]) -> f64 {
    let mut total = 0.0;
    for k in 1..n {
        // column-major (2^(n−k)) × 2^k view is the transpose of the row-major cut
        let x = DMatrixView::from_slice(amps, 1 << (n - k), 1 << k);
        let gram = if k <= n - k { x.tr_mul(&x) } else { x * x.transpose() };
        let mut w: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().copied().collect();
        w.sort_by(|a, b| b.total_cmp(a));
        total += w
            .iter()
            .skip(2)
            .filter(|&&p| p > GRAM_FLOOR)
            .map(|&p| -p * p.log2())
            .sum::<f64>();
    }
    total
}

fn entropy_terms<'a>(values: impl Iterator<Item = &'a f64>) -> f64 {
    values
        .filter(|&&v| v > ZERO_SV)
        .map(|&v| {
            let p = v * v;
            -p * p.log2()
        })
        .sum()
}
