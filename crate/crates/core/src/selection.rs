//! Chain placement, best-gate choice and the chain priority queue.

use serde::{Deserialize, Serialize};

use crate::arch::{ArchGraph, EdgeId};
use crate::circuit::{Circuit, GateId, RemainingDag};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One single-ion chain per qubit: chain `j` carries qubit `j`.
pub type ChainId = usize;

/// Injective chain -> edge map with its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<EdgeId>", into = "Vec<EdgeId>")]
pub struct IonPlacement {
    chain_edge: Vec<EdgeId>,
    #[serde(skip)]
    edge_chain: Vec<Option<ChainId>>,
}

impl TryFrom<Vec<EdgeId>> for IonPlacement {
    type Error = Error;

    fn try_from(edges: Vec<EdgeId>) -> Result<Self> {
        let len = edges.iter().max().map_or(0, |&e| e + 1);
        let mut edge_chain = vec![None; len];
        for (c, &e) in edges.iter().enumerate() {
            if edge_chain[e].replace(c).is_some() {
                return Err(Error::validation("placement", format!("two chains on edge {e}")));
            }
        }
        Ok(IonPlacement {
            chain_edge: edges,
            edge_chain,
        })
    }
}

impl From<IonPlacement> for Vec<EdgeId> {
    fn from(p: IonPlacement) -> Self {
        p.chain_edge
    }
}

impl IonPlacement {
    /// Places chain `j` on `edges[j]`, checking that every edge exists and is used once.
    pub fn new(graph: &ArchGraph, edges: Vec<EdgeId>) -> Result<Self> {
        if let Some(&e) = edges.iter().find(|&&e| e >= graph.edge_count()) {
            return Err(Error::UnknownEdge(e));
        }
        let mut p = IonPlacement::try_from(edges)?;
        p.edge_chain.resize(graph.edge_count(), None);
        Ok(p)
    }

    /// Re-validates a deserialized placement against a graph.
    pub fn attach(self, graph: &ArchGraph) -> Result<Self> {
        IonPlacement::new(graph, self.chain_edge)
    }

    pub fn chain_count(&self) -> usize {
        self.chain_edge.len()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.chain_edge
    }

    pub fn edge_of(&self, chain: ChainId) -> EdgeId {
        self.chain_edge[chain]
    }

    pub fn chain_at(&self, edge: EdgeId) -> Option<ChainId> {
        self.edge_chain.get(edge).copied().flatten()
    }

    pub fn is_occupied(&self, edge: EdgeId) -> bool {
        self.chain_at(edge).is_some()
    }

    /// Moves a chain onto a free edge.
    pub fn relocate(&mut self, chain: ChainId, to: EdgeId) -> Result<()> {
        if to >= self.edge_chain.len() {
            return Err(Error::UnknownEdge(to));
        }
        if let Some(other) = self.edge_chain[to] {
            if other != chain {
                return Err(Error::validation(
                    "placement",
                    format!("edge {to} is held by chain {other}"),
                ));
            }
            return Ok(());
        }
        let from = self.chain_edge[chain];
        self.edge_chain[from] = None;
        self.edge_chain[to] = Some(chain);
        self.chain_edge[chain] = to;
        Ok(())
    }

    /// Applies a set of moves at once; the result must be injective.
    pub fn relocate_all(&mut self, moves: &[(ChainId, EdgeId)]) -> Result<()> {
        for &(c, _) in moves {
            let from = self.chain_edge[c];
            if self.edge_chain[from] == Some(c) {
                self.edge_chain[from] = None;
            }
        }
        for &(c, to) in moves {
            self.chain_edge[c] = to;
        }
        for &(c, to) in moves {
            if to >= self.edge_chain.len() {
                return Err(Error::UnknownEdge(to));
            }
            if let Some(other) = self.edge_chain[to] {
                return Err(Error::validation(
                    "placement",
                    format!("chains {other} and {c} meet on edge {to}"),
                ));
            }
            self.edge_chain[to] = Some(c);
        }
        Ok(())
    }

    /// Junction distance of a chain to the processing zone; zero inside it.
    pub fn chain_distance(&self, graph: &ArchGraph, chain: ChainId) -> u32 {
        let e = self.chain_edge[chain];
        if graph.in_pz_region(e) {
            0
        } else {
            graph.crossings_to_entry(e)
        }
    }

    /// `(crossings, hops)` variant used to order chains of one gate.
    fn chain_rank_key(&self, graph: &ArchGraph, chain: ChainId) -> (u32, u32, ChainId) {
        let e = self.chain_edge[chain];
        if graph.in_pz_region(e) {
            return (0, 0, chain);
        }
        let d = graph.distance_to_entry(e);
        (d.crossings, d.hops, chain)
    }
}

/// Gate of `front` with the least summed chain distance to the processing zone; lowest id on ties.
pub fn best_gate<T: Scalar>(
    front: impl IntoIterator<Item = GateId>,
    circuit: &Circuit<T>,
    placement: &IonPlacement,
    graph: &ArchGraph,
) -> Result<GateId> {
    front
        .into_iter()
        .map(|g| {
            let cost: u32 = circuit
                .gate(g)
                .qubits
                .iter()
                .map(|&q| placement.chain_distance(graph, q))
                .sum();
            (cost, g)
        })
        .min()
        .map(|(_, g)| g)
        .ok_or(Error::EmptyFrontLayer)
}

/// Ranked chains plus the gates they were drawn from, in selection order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PriorityQueue {
    pub chains: Vec<ChainId>,
    pub gates: Vec<GateId>,
    pub max_len: usize,
}

impl PriorityQueue {
    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn rank(&self, chain: ChainId) -> Option<usize> {
        self.chains.iter().position(|&c| c == chain)
    }

    pub fn contains(&self, chain: ChainId) -> bool {
        self.chains.contains(&chain)
    }
}

/// Repeatedly takes the best gate of a working copy of `dag`, enqueues its chains
/// (nearest first) and deletes it, until `max_len` chains are queued or the copy is empty.
pub fn build_priority_queue<T: Scalar>(
    dag: &RemainingDag<'_>,
    circuit: &Circuit<T>,
    placement: &IonPlacement,
    graph: &ArchGraph,
    max_len: usize,
) -> PriorityQueue {
    let mut work = dag.clone();
    let mut q = PriorityQueue {
        max_len,
        ..Default::default()
    };
    // no chain can be added once every qubit is queued
    let cap = max_len.min(circuit.qubit_count());
    while q.chains.len() < cap && !work.is_empty() {
        let g = best_gate(work.front(), circuit, placement, graph).expect("non-empty dag has a front");
        let mut chains = circuit.gate(g).qubits.clone();
        chains.sort_by_key(|&c| placement.chain_rank_key(graph, c));
        for c in chains {
            if q.chains.len() < max_len && !q.chains.contains(&c) {
                q.chains.push(c);
            }
        }
        q.gates.push(g);
        work.remove(g);
    }
    q
}
