//! Device-independent compilation passes.

use super::{commutes, Circuit, Gate, GateKind, Qubit};
use crate::error::{Error, Result};
use crate::scalar::{is_zero_angle, Scalar};

/// Removes every SWAP by relabeling the gates after it.
///
/// Returns the rewritten circuit and `perm`, where the final state of qubit `w` of
/// the input lives on qubit `perm[w]` of the output.
pub fn eliminate_swaps<T: Scalar>(c: &Circuit<T>) -> (Circuit<T>, Vec<Qubit>) {
    let mut wire_to_phys: Vec<Qubit> = (0..c.qubit_count()).collect();
    let mut gates = Vec::with_capacity(c.len());
    for g in c.gates() {
        if g.kind == GateKind::Swap {
            wire_to_phys.swap(g.qubits[0], g.qubits[1]);
            continue;
        }
        gates.push(Gate {
            qubits: g.qubits.iter().map(|&q| wire_to_phys[q]).collect(),
            ..g.clone()
        });
    }
    (Circuit::from_gates(c.qubit_count(), gates), wire_to_phys)
}

fn native<T: Scalar>(kind: GateKind, qubits: &[Qubit], angle: T) -> Gate<T> {
    Gate {
        id: 0,
        kind,
        qubits: qubits.to_vec(),
        angle: Some(angle),
    }
}

fn push_h<T: Scalar>(out: &mut Vec<Gate<T>>, q: Qubit) {
    out.push(native(GateKind::Ry, &[q], -T::FRAC_PI_2()));
    out.push(native(GateKind::Rz, &[q], T::PI()));
}

/// Rewrites H, CX and CP into `RX/RY/RZ/RZZ`; each rule is exact up to global phase.
///
/// * `H -> RY(-pi/2), RZ(pi)`
/// * `CP(t) -> RZ(t/2) c, RZ(t/2) t, RZZ(-t/2)`
/// * `CX(c,t) -> H t, RZ(-pi/2) c, RZ(-pi/2) t, RZZ(pi/2), H t`
pub fn decompose_to_native<T: Scalar>(c: &Circuit<T>) -> Result<Circuit<T>> {
    let two = T::one() + T::one();
    let mut out = Vec::with_capacity(c.len() * 2);
    for g in c.gates() {
        match g.kind {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rzz => out.push(g.clone()),
            GateKind::H => push_h(&mut out, g.qubits[0]),
            GateKind::Cp => {
                let theta = g.angle.expect("cp carries an angle");
                let (a, b) = (g.qubits[0], g.qubits[1]);
                out.push(native(GateKind::Rz, &[a], theta / two));
                out.push(native(GateKind::Rz, &[b], theta / two));
                out.push(native(GateKind::Rzz, &[a, b], -theta / two));
            }
            GateKind::Cx => {
                let (ctl, tgt) = (g.qubits[0], g.qubits[1]);
                push_h(&mut out, tgt);
                out.push(native(GateKind::Rz, &[ctl], -T::FRAC_PI_2()));
                out.push(native(GateKind::Rz, &[tgt], -T::FRAC_PI_2()));
                out.push(native(GateKind::Rzz, &[ctl, tgt], T::FRAC_PI_2()));
                push_h(&mut out, tgt);
            }
            GateKind::Swap => {
                return Err(Error::Unsupported(format!(
                    "gate {} is a swap; run eliminate_swaps first",
                    g.id
                )))
            }
        }
    }
    Ok(Circuit::from_gates(c.qubit_count(), out))
}

/// One merge sweep followed by removal of identity rotations. A gate is merged into an
/// earlier same-slot rotation when every gate in between that touches its qubits
/// commutes with it.
fn peephole_sweep<T: Scalar>(c: &Circuit<T>) -> Vec<Gate<T>> {
    let mut out: Vec<Gate<T>> = Vec::with_capacity(c.len());
    // indices into `out` of the gates touching each qubit, ascending
    let mut on_qubit: Vec<Vec<usize>> = vec![Vec::new(); c.qubit_count()];
    for g in c.gates() {
        let mut earlier: Vec<usize> = g.qubits.iter().flat_map(|&q| on_qubit[q].iter().copied()).collect();
        earlier.sort_unstable_by(|a, b| b.cmp(a));
        earlier.dedup();
        let mut target = None;
        for i in earlier {
            if out[i].same_slot(g) {
                target = Some(i);
                break;
            }
            if !commutes(&out[i], g) {
                break;
            }
        }
        if let Some(i) = target {
            let p = &mut out[i];
            p.angle = match (p.angle, g.angle) {
                (Some(a), Some(b)) => Some(a + b),
                _ => unreachable!("native gates are parameterized"),
            };
            continue;
        }
        for &q in &g.qubits {
            on_qubit[q].push(out.len());
        }
        out.push(g.clone());
    }
    out.retain(|g| !g.angle.is_some_and(is_zero_angle));
    out
}

/// Merges same-slot rotations that can be brought together and drops rotations by a multiple of 2pi,
/// repeating until nothing changes.
pub fn peephole_optimize<T: Scalar>(c: &Circuit<T>) -> Circuit<T> {
    let mut cur = c.clone();
    loop {
        let next = Circuit::from_gates(c.qubit_count(), peephole_sweep(&cur));
        if next.len() == cur.len() {
            return next;
        }
        cur = next;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compiled<T> {
    pub circuit: Circuit<T>,
    /// Output qubit permutation left behind by removed SWAPs.
    pub permutation: Vec<Qubit>,
}

/// Full pipeline: SWAP elimination, native rewrite, peephole optimization.
pub fn compile<T: Scalar>(c: &Circuit<T>) -> Result<Compiled<T>> {
    let (no_swaps, permutation) = eliminate_swaps(c);
    let native = decompose_to_native(&no_swaps)?;
    Ok(Compiled {
        circuit: peephole_optimize(&native),
        permutation,
    })
}
