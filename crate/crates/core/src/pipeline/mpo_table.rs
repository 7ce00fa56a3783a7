use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::build_pqc;
use crate::error::{Error, Result};
use crate::tensornet::circuit_to_mpo;

/// Largest register `mpo_table` accepts.
pub const MPO_TABLE_MAX_QUBITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MpoRow {
    pub n_qubits: usize,
    pub layers: usize,
    pub max_bond_dim: usize,
}

/// Max MPO bond dimension of a random-angle PQC for every `2 ≤ n ≤ max_qubits`
/// and `1 ≤ L ≤ n`. Angles are uniform on `[0, 2π)`, drawn from a ChaCha8
/// stream per `(n, L)`.
pub fn mpo_table(max_qubits: usize, svd_cutoff: f64, seed: u64) -> Result<Vec<MpoRow>> {
    if max_qubits > MPO_TABLE_MAX_QUBITS {
        return Err(Error::TooLarge {
            n: max_qubits,
            max: MPO_TABLE_MAX_QUBITS,
        });
    }
    let mut rows = Vec::new();
    for n in 2..=max_qubits {
        for layers in 1..=n {
            let template = build_pqc(n, layers, false)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((n * 64 + layers) as u64);
            let theta: Vec<f64> = (0..template.n_params())
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect();
            let mpo = circuit_to_mpo(&template.bind(&theta)?, svd_cutoff)?;
            rows.push(MpoRow {
                n_qubits: n,
                layers,
                max_bond_dim: mpo.max_bond_dim().unwrap_or(1),
            });
        }
    }
    Ok(rows)
}

/// `n layers max_bond_dim` columns.
pub fn export_mpo_table(rows: &[MpoRow]) -> String {
    let mut out = String::from("n layers max_bond_dim\n");
    for r in rows {
        out.push_str(&format!("{} {} {}\n", r.n_qubits, r.layers, r.max_bond_dim));
    }
    out
}
