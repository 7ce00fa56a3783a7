//! Gate-level circuits over real amplitudes.
//!
//! Qubit 0 is the most significant bit of a basis index.

mod ansatz;
mod circuit;
mod gate;
mod qasm;
mod synth;

pub use ansatz::{build_pqc, pqc_cx_count, pqc_param_count, PqcTemplate, Slot};
pub use circuit::{Circuit, Metrics};
pub use gate::{cx_matrix, ry_matrix, swap_conjugate, Gate, ORTHOGONAL_TOL};
pub use qasm::{export_qasm, parse_qasm};
pub use synth::{synthesize, synthesize_single_qubit, synthesize_two_qubit};
