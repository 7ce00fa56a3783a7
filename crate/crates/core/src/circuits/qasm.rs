use std::fmt::Write as _;

use super::circuit::Circuit;
use super::gate::Gate;
use crate::error::{Error, Result};

/// OpenQASM 2.0 text with one `ry`/`cx` instruction per line.
///
/// Angles are written with Rust's shortest round-trip float formatting, so
/// [`parse_qasm`] recovers them bit for bit.
pub fn export_qasm(circuit: &Circuit) -> Result<String> {
    if circuit.has_raw_gates() {
        return Err(Error::SynthesizeFirst);
    }
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg q[{}];", circuit.n_qubits()).unwrap();
    for g in circuit.gates() {
        match g {
            Gate::Ry { qubit, angle } => writeln!(out, "ry({angle:?}) q[{qubit}];").unwrap(),
            Gate::Cx { control, target } => writeln!(out, "cx q[{control}],q[{target}];").unwrap(),
            _ => unreachable!("raw gates rejected above"),
        }
    }
    Ok(out)
}

/// Parse the subset of OpenQASM 2.0 produced by [`export_qasm`].
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        let err = |msg: &str| Error::Parse(format!("line {}: {msg}: {line:?}", lineno + 1));
        let stmt = line.strip_suffix(';').ok_or_else(|| err("missing ';'"))?;
        if stmt.starts_with("OPENQASM") || stmt.starts_with("include") {
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("qreg ") {
            let n = register_index(rest).ok_or_else(|| err("bad register"))?;
            circuit = Some(Circuit::new(n));
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| err("gate before qreg"))?;
        let gate = if let Some(rest) = stmt.strip_prefix("ry(") {
            let (angle, operand) = rest.split_once(')').ok_or_else(|| err("bad ry"))?;
            let angle: f64 = angle.trim().parse().map_err(|_| err("bad angle"))?;
            let q = register_index(operand.trim()).ok_or_else(|| err("bad operand"))?;
            Gate::ry(q, angle)
        } else if let Some(rest) = stmt.strip_prefix("cx ") {
            let (a, b) = rest.split_once(',').ok_or_else(|| err("bad cx"))?;
            let a = register_index(a.trim()).ok_or_else(|| err("bad operand"))?;
            let b = register_index(b.trim()).ok_or_else(|| err("bad operand"))?;
            Gate::cx(a, b)
        } else {
            return Err(err("unsupported instruction"));
        };
        c.push(gate)?;
    }
    circuit.ok_or_else(|| Error::Parse("no qreg declaration".into()))
}

/// `q[7]` → 7
fn register_index(s: &str) -> Option<usize> {
    s.strip_prefix("q[")?.strip_suffix(']')?.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    #[test]
    fn single_ry_line() {
        let c = Circuit::from_gates(1, vec![Gate::ry(0, 0.5)]).unwrap();
        assert!(export_qasm(&c).unwrap().lines().any(|l| l == "ry(0.5) q[0];"));
    }

    #[test]
    fn cx_line() {
        let c = Circuit::from_gates(2, vec![Gate::cx(0, 1)]).unwrap();
        let text = export_qasm(&c).unwrap();
        assert!(text.contains("cx q[0],q[1];"));
        assert!(text.contains("qreg q[2];"));
    }

    #[test]
    fn raw_gates_rejected() {
        let c = Circuit::from_gates(1, vec![Gate::u1(0, Matrix2::identity()).unwrap()]).unwrap();
        assert!(matches!(export_qasm(&c), Err(Error::SynthesizeFirst)));
    }

    #[test]
    fn round_trip_is_exact() {
        let c = Circuit::from_gates(
            3,
            vec![Gate::ry(0, 0.1 + 0.2), Gate::cx(1, 2), Gate::ry(2, -1e-17), Gate::cx(1, 0)],
        )
        .unwrap();
        assert_eq!(parse_qasm(&export_qasm(&c).unwrap()).unwrap(), c);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_qasm("ry(0.1) q[0];").is_err());
        assert!(parse_qasm("qreg q[1];\nh q[0];").is_err());
        assert!(parse_qasm("qreg q[1];\nry(0.1) q[3];").is_err());
    }
}
