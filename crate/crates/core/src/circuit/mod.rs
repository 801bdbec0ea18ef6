//! Circuits, compilation passes and the dependency graph.

mod dag;
mod generators;
mod passes;
mod qasm;

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use dag::{commutes, DependencyGraph, RemainingDag};
pub use generators::{builtin, fra, ghz, graph_state, qft};
pub use passes::{compile, decompose_to_native, eliminate_swaps, peephole_optimize, Compiled};
pub use qasm::parse_circuit;

pub type GateId = usize;
pub type Qubit = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Rzz,
    H,
    Cx,
    Cp,
    Swap,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::H => 1,
            GateKind::Rzz | GateKind::Cx | GateKind::Cp | GateKind::Swap => 2,
        }
    }

    pub fn is_parameterized(self) -> bool {
        matches!(
            self,
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rzz | GateKind::Cp
        )
    }

    pub fn is_native(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rzz)
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(self) -> bool {
        matches!(self, GateKind::Rz | GateKind::Rzz | GateKind::Cp)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Rzz => "rzz",
            GateKind::H => "h",
            GateKind::Cx => "cx",
            GateKind::Cp => "cp",
            GateKind::Swap => "swap",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        Some(match name {
            "rx" => GateKind::Rx,
            "ry" => GateKind::Ry,
            "rz" => GateKind::Rz,
            "rzz" => GateKind::Rzz,
            "h" => GateKind::H,
            "cx" => GateKind::Cx,
            "cp" => GateKind::Cp,
            "swap" => GateKind::Swap,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate<T> {
    pub id: GateId,
    pub kind: GateKind,
    pub qubits: Vec<Qubit>,
    /// Rotation angle in radians; `None` for fixed gates.
    pub angle: Option<T>,
}

impl<T: Scalar> Gate<T> {
    pub fn acts_on(&self, q: Qubit) -> bool {
        self.qubits.contains(&q)
    }

    pub fn shares_qubit(&self, other: &Gate<T>) -> bool {
        self.qubits.iter().any(|&q| other.acts_on(q))
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits.len() == 2
    }

    /// Same kind on the same (unordered) operand set.
    pub fn same_slot(&self, other: &Gate<T>) -> bool {
        if self.kind != other.kind || self.qubits.len() != other.qubits.len() {
            return false;
        }
        match self.qubits.len() {
            1 => self.qubits[0] == other.qubits[0],
            _ => {
                let mut a = self.qubits.clone();
                let mut b = other.qubits.clone();
                a.sort_unstable();
                b.sort_unstable();
                a == b
            }
        }
    }
}

/// Ordered gate list over `qubit_count` logical qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T> {
    qubit_count: usize,
    gates: Vec<Gate<T>>,
}

impl<T: Scalar> Circuit<T> {
    pub fn new(qubit_count: usize) -> Self {
        Circuit {
            qubit_count,
            gates: Vec::new(),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&self, id: GateId) -> &Gate<T> {
        &self.gates[id]
    }

    pub fn is_native(&self) -> bool {
        self.gates.iter().all(|g| g.kind.is_native())
    }

    /// Appends a gate after checking operand count, range, distinctness and angle.
    pub fn push(&mut self, kind: GateKind, qubits: &[Qubit], angle: Option<T>) -> Result<GateId> {
        if qubits.len() != kind.arity() {
            return Err(Error::validation(
                "qubits",
                format!("{} takes {} qubit(s), got {}", kind.name(), kind.arity(), qubits.len()),
            ));
        }
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.qubit_count) {
            return Err(Error::validation(
                "qubits",
                format!("qubit {q} out of range for {} qubits", self.qubit_count),
            ));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::validation(
                "qubits",
                format!("{} needs distinct qubits", kind.name()),
            ));
        }
        match (kind.is_parameterized(), angle) {
            (true, None) => {
                return Err(Error::validation("angle", format!("{} needs an angle", kind.name())));
            }
            (true, Some(a)) if !a.is_finite() => {
                return Err(Error::validation("angle", "angle must be finite"));
            }
            (false, Some(_)) => {
                return Err(Error::validation("angle", format!("{} takes no angle", kind.name())));
            }
            _ => {}
        }
        let id = self.gates.len();
        self.gates.push(Gate {
            id,
            kind,
            qubits: qubits.to_vec(),
            angle,
        });
        Ok(id)
    }

    /// Builder-style `push` for generators whose inputs are known to be valid.
    pub(crate) fn with(mut self, kind: GateKind, qubits: &[Qubit], angle: Option<T>) -> Self {
        self.push(kind, qubits, angle).expect("generator emits valid gates");
        self
    }

    pub(crate) fn from_gates(qubit_count: usize, gates: impl IntoIterator<Item = Gate<T>>) -> Self {
        let gates = gates.into_iter().enumerate().map(|(id, g)| Gate { id, ..g }).collect();
        Circuit { qubit_count, gates }
    }

    /// Converts angles to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Circuit<U> {
        Circuit {
            qubit_count: self.qubit_count,
            gates: self
                .gates
                .iter()
                .map(|g| Gate {
                    id: g.id,
                    kind: g.kind,
                    qubits: g.qubits.clone(),
                    angle: g.angle.map(|a| U::from_f64_lossy(a.to_f64().unwrap_or(f64::NAN))),
                })
                .collect(),
        }
    }

    /// OpenQASM 2 text of the circuit.
    pub fn to_qasm(&self) -> String {
        qasm::emit(self)
    }
}

impl<T: Scalar> fmt::Display for Circuit<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_qasm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_validates_operands() {
        let mut c = Circuit::<f64>::new(2);
        assert!(c.push(GateKind::Rx, &[0], Some(1.0)).is_ok());
        assert!(c.push(GateKind::Rx, &[2], Some(1.0)).is_err());
        assert!(c.push(GateKind::Rzz, &[1, 1], Some(1.0)).is_err());
        assert!(c.push(GateKind::Rzz, &[0], Some(1.0)).is_err());
        assert!(c.push(GateKind::H, &[0], Some(1.0)).is_err());
        assert!(c.push(GateKind::Rz, &[0], None).is_err());
        assert!(c.push(GateKind::Rz, &[0], Some(f64::INFINITY)).is_err());
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn cast_keeps_structure() {
        let c = qft::<f64>(3);
        let c32: Circuit<f32> = c.cast();
        assert_eq!(c32.len(), c.len());
        assert_eq!(c32.gates()[1].qubits, c.gates()[1].qubits);
    }
}
