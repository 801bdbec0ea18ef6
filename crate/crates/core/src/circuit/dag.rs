use std::collections::BTreeSet;

use super::{Circuit, Gate, GateId};
use crate::scalar::Scalar;

/// Commutation rule set: disjoint gates, two diagonal gates, or two single-qubit
/// rotations of one kind on the same qubit.
pub fn commutes<T: Scalar>(a: &Gate<T>, b: &Gate<T>) -> bool {
    if !a.shares_qubit(b) {
        return true;
    }
    if a.kind.is_diagonal() && b.kind.is_diagonal() {
        return true;
    }
    a.kind == b.kind && a.qubits.len() == 1 && b.qubits.len() == 1
}

/// Precedence DAG over gate ids: an edge `a -> b` for every earlier `a` that shares a
/// qubit with `b` and does not commute with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    preds: Vec<Vec<GateId>>,
    succs: Vec<Vec<GateId>>,
}

impl DependencyGraph {
    pub fn build<T: Scalar>(c: &Circuit<T>) -> Self {
        let n = c.len();
        let mut preds: Vec<Vec<GateId>> = vec![Vec::new(); n];
        let mut succs: Vec<Vec<GateId>> = vec![Vec::new(); n];
        let mut on_qubit: Vec<Vec<GateId>> = vec![Vec::new(); c.qubit_count()];
        for b in c.gates() {
            let mut p: Vec<GateId> = b
                .qubits
                .iter()
                .flat_map(|&q| on_qubit[q].iter().copied())
                .filter(|&a| !commutes(c.gate(a), b))
                .collect();
            p.sort_unstable();
            p.dedup();
            for &a in &p {
                succs[a].push(b.id);
            }
            preds[b.id] = p;
            for &q in &b.qubits {
                on_qubit[q].push(b.id);
            }
        }
        DependencyGraph { preds, succs }
    }

    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    pub fn preds(&self, g: GateId) -> &[GateId] {
        &self.preds[g]
    }

    pub fn succs(&self, g: GateId) -> &[GateId] {
        &self.succs[g]
    }

    pub fn edge_count(&self) -> usize {
        self.preds.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, a: GateId, b: GateId) -> bool {
        self.preds[b].binary_search(&a).is_ok()
    }

    /// Gates without predecessors, ascending.
    pub fn front_layer(&self) -> Vec<GateId> {
        (0..self.len()).filter(|&g| self.preds[g].is_empty()).collect()
    }

    /// True when `order` lists every gate once and respects every edge.
    pub fn is_topological_order(&self, order: &[GateId]) -> bool {
        if order.len() != self.len() {
            return false;
        }
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &g) in order.iter().enumerate() {
            if g >= self.len() || pos[g] != usize::MAX {
                return false;
            }
            pos[g] = i;
        }
        (0..self.len()).all(|b| self.preds[b].iter().all(|&a| pos[a] < pos[b]))
    }
}

/// Shrinking working copy of a [`DependencyGraph`].
#[derive(Debug, Clone)]
pub struct RemainingDag<'a> {
    graph: &'a DependencyGraph,
    pending_preds: Vec<usize>,
    removed: Vec<bool>,
    front: BTreeSet<GateId>,
    remaining: usize,
}

impl<'a> RemainingDag<'a> {
    pub fn new(graph: &'a DependencyGraph) -> Self {
        let pending_preds: Vec<usize> = (0..graph.len()).map(|g| graph.preds(g).len()).collect();
        let front = (0..graph.len()).filter(|&g| pending_preds[g] == 0).collect();
        RemainingDag {
            graph,
            pending_preds,
            removed: vec![false; graph.len()],
            front,
            remaining: graph.len(),
        }
    }

    pub fn graph(&self) -> &'a DependencyGraph {
        self.graph
    }

    /// Current front layer, ascending.
    pub fn front(&self) -> impl Iterator<Item = GateId> + '_ {
        self.front.iter().copied()
    }

    pub fn in_front(&self, g: GateId) -> bool {
        self.front.contains(&g)
    }

    pub fn is_removed(&self, g: GateId) -> bool {
        self.removed[g]
    }

    pub fn len(&self) -> usize {
        self.remaining
    }

    pub fn is_empty(&self) -> bool {
        self.remaining == 0
    }

    /// Deletes a front-layer gate. Returns false (and does nothing) for any other gate.
    pub fn remove(&mut self, g: GateId) -> bool {
        if !self.front.remove(&g) {
            return false;
        }
        self.removed[g] = true;
        self.remaining -= 1;
        for &s in self.graph.succs(g) {
            self.pending_preds[s] -= 1;
            if self.pending_preds[s] == 0 {
                self.front.insert(s);
            }
        }
        true
    }
}
