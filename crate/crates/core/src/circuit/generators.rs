//! Benchmark circuit families, in their pre-translation form.

use super::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Full register access: one `RX(pi)` per qubit.
pub fn fra<T: Scalar>(n: usize) -> Circuit<T> {
    (0..n).fold(Circuit::new(n), |c, q| c.with(GateKind::Rx, &[q], Some(T::PI())))
}

pub fn ghz<T: Scalar>(n: usize) -> Circuit<T> {
    let mut c = Circuit::new(n);
    if n == 0 {
        return c;
    }
    c = c.with(GateKind::H, &[0], None);
    for q in 1..n {
        c = c.with(GateKind::Cx, &[q - 1, q], None);
    }
    c
}

/// Graph state on a ring of `n` qubits.
pub fn graph_state<T: Scalar>(n: usize) -> Circuit<T> {
    let mut c = (0..n).fold(Circuit::new(n), |c, q| c.with(GateKind::H, &[q], None));
    let ring = match n {
        0 | 1 => 0,
        2 => 1,
        _ => n,
    };
    for i in 0..ring {
        c = c.with(GateKind::Cp, &[i, (i + 1) % n], Some(T::PI()));
    }
    c
}

/// Textbook QFT including the trailing qubit-reversal SWAPs.
pub fn qft<T: Scalar>(n: usize) -> Circuit<T> {
    let mut c = Circuit::new(n);
    for j in 0..n {
        c = c.with(GateKind::H, &[j], None);
        for k in j + 1..n {
            let angle = T::PI() / T::from_f64_lossy(2f64.powi((k - j) as i32));
            c = c.with(GateKind::Cp, &[k, j], Some(angle));
        }
    }
    for i in 0..n / 2 {
        c = c.with(GateKind::Swap, &[i, n - 1 - i], None);
    }
    c
}

/// Resolves `family:N` (`fra`, `ghz`, `graph`, `qft`).
pub fn builtin<T: Scalar>(name: &str) -> Result<Circuit<T>> {
    let (family, n) = name
        .split_once(':')
        .ok_or_else(|| Error::validation("circuit", format!("expected 'family:N', got '{name}'")))?;
    let n: usize = n
        .parse()
        .map_err(|_| Error::validation("circuit", format!("bad qubit count in '{name}'")))?;
    match family {
        "fra" => Ok(fra(n)),
        "ghz" => Ok(ghz(n)),
        "graph" => Ok(graph_state(n)),
        "qft" => Ok(qft(n)),
        _ => Err(Error::validation(
            "circuit",
            format!("unknown circuit family '{family}'"),
        )),
    }
}
