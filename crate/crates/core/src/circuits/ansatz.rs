use super::circuit::{apply_gate, Circuit};
use super::gate::Gate;
use crate::error::{Error, Result};

/// One slot of the ansatz: either a parametrized rotation or a fixed CX.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Ry { qubit: usize, param: usize },
    Cx { control: usize, target: usize },
}

/// Hardware-efficient brickwork ansatz of `Ry` layers and nearest-neighbour CX.
///
/// Each layer is:
/// 1. `Ry` on every qubit,
/// 2. CX on the even pairs `(0,1), (2,3), …`,
/// 3. `Ry` on both qubits of every odd pair `(1,2), (3,4), …`,
/// 4. CX on the odd pairs.
///
/// CX control is always the lower index. An optional trailing `Ry` layer keeps
/// the circuit from ending on entangling gates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PqcTemplate {
    n_qubits: usize,
    n_layers: usize,
    final_rotation_layer: bool,
    slots: Vec<Slot>,
    n_params: usize,
}

impl PqcTemplate {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn final_rotation_layer(&self) -> bool {
        self.final_rotation_layer
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn cx_count(&self) -> usize {
        self.slots
            .iter()
            .filter(|s| matches!(s, Slot::Cx { .. }))
            .count()
    }

    fn check_len(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params {
            return Err(Error::ParameterLength {
                expected: self.n_params,
                got: theta.len(),
            });
        }
        Ok(())
    }

    /// Substitute `theta` into the template, in slot order.
    pub fn bind(&self, theta: &[f64]) -> Result<Circuit> {
        self.check_len(theta)?;
        let gates = self
            .slots
            .iter()
            .map(|s| match *s {
                Slot::Ry { qubit, param } => Gate::ry(qubit, theta[param]),
                Slot::Cx { control, target } => Gate::cx(control, target),
            })
            .collect();
        Circuit::from_gates(self.n_qubits, gates)
    }

    /// Apply the bound circuit directly to an amplitude buffer, skipping the
    /// intermediate [`Circuit`]. Used in the training inner loop.
    pub fn apply_in_place(&self, theta: &[f64], amps: &mut [f64]) -> Result<()> {
        self.check_len(theta)?;
        if amps.len() != 1 << self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n_qubits,
                got: amps.len(),
            });
        }
        for s in &self.slots {
            let g = match *s {
                Slot::Ry { qubit, param } => Gate::ry(qubit, theta[param]),
                Slot::Cx { control, target } => Gate::cx(control, target),
            };
            apply_gate(self.n_qubits, &g, amps);
        }
        Ok(())
    }
}

/// Parameter count `m·(n + 2⌊(n−1)/2⌋)`, plus `n` with a final rotation layer.
pub fn pqc_param_count(n: usize, m: usize, final_rotation_layer: bool) -> usize {
    m * (n + 2 * ((n - 1) / 2)) + if final_rotation_layer { n } else { 0 }
}

/// CX count `m·(⌊n/2⌋ + ⌊(n−1)/2⌋)`.
pub fn pqc_cx_count(n: usize, m: usize) -> usize {
    m * (n / 2 + (n - 1) / 2)
}

pub fn build_pqc(n: usize, m: usize, final_rotation_layer: bool) -> Result<PqcTemplate> {
    if n < 2 {
        return Err(Error::InvalidAnsatz(format!("need at least 2 qubits, got {n}")));
    }
    if m < 1 {
        return Err(Error::InvalidAnsatz("need at least one layer".into()));
    }
    let mut slots = Vec::new();
    let mut param = 0;
    let mut ry = |slots: &mut Vec<Slot>, qubit| {
        slots.push(Slot::Ry { qubit, param });
        param += 1;
    };
    for _ in 0..m {
        for q in 0..n {
            ry(&mut slots, q);
        }
        for q in (0..n - 1).step_by(2) {
            slots.push(Slot::Cx { control: q, target: q + 1 });
        }
        for q in (1..n - 1).step_by(2) {
            ry(&mut slots, q);
            ry(&mut slots, q + 1);
        }
        for q in (1..n - 1).step_by(2) {
            slots.push(Slot::Cx { control: q, target: q + 1 });
        }
    }
    if final_rotation_layer {
        for q in 0..n {
            ry(&mut slots, q);
        }
    }
    let n_params = param;
    debug_assert_eq!(n_params, pqc_param_count(n, m, final_rotation_layer));
    Ok(PqcTemplate {
        n_qubits: n,
        n_layers: m,
        final_rotation_layer,
        slots,
        n_params,
    })
}
