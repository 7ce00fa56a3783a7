//! Matrix product states and operators.

mod entropy;
mod mpo;
mod mps;

pub use entropy::{bond_entropy, cumulative_ee, sparse_ee_loss, truncation_bound};
pub use mpo::{circuit_to_mpo, Mpo, MpoSite, DEFAULT_SVD_CUTOFF, MAX_MPO_QUBITS};
pub use mps::{bond_spectra, mps_to_statevector, to_mps, BondSpectra, Mps, DEFAULT_MAX_QUBITS};

pub(crate) use entropy::cumulative_ee_gram;
pub(crate) use mps::spectra_of;

/// Singular values at or below this count as zero in entropy sums.
pub const ZERO_SV: f64 = 1e-12;
