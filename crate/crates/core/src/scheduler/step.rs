use super::{ActiveGate, Move, SystemState, TimeStep};
use crate::arch::{ArchGraph, Cycle, Distance, EdgeId, NodeId};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::selection::{ChainId, IonPlacement, PriorityQueue};

/// Chains allowed to attempt a junction crossing: the chain at rank `k` moves iff every
/// chain ranked before it is strictly closer to the processing zone.
pub fn eligible_movers(queue: &PriorityQueue, placement: &IonPlacement, graph: &ArchGraph) -> Vec<ChainId> {
    let mut out = Vec::new();
    let mut farthest_before: Option<u32> = None;
    for &c in &queue.chains {
        let d = placement.chain_distance(graph, c);
        if farthest_before.is_none_or(|m| m < d) {
            out.push(c);
        }
        farthest_before = Some(farthest_before.map_or(d, |m| m.max(d)));
    }
    out
}

/// Junctions and loop edges already claimed in the current step.
#[derive(Debug, Clone)]
struct Reservations {
    junctions: Vec<bool>,
    edges: Vec<bool>,
}

impl Reservations {
    fn new(graph: &ArchGraph) -> Self {
        Reservations {
            junctions: vec![false; graph.node_count()],
            edges: vec![false; graph.edge_count()],
        }
    }

    fn admits(&self, graph: &ArchGraph, cycle: &Cycle) -> bool {
        cycle.junctions(graph).all(|x| !self.junctions[x]) && cycle.edges.iter().all(|&e| !self.edges[e])
    }

    fn reserve(&mut self, graph: &ArchGraph, cycle: &Cycle) {
        for x in cycle.junctions(graph) {
            self.junctions[x] = true;
        }
        for &e in &cycle.edges {
            self.edges[e] = true;
        }
    }
}

#[derive(Debug, Clone)]
pub struct CycleProposal {
    pub cycle: Cycle,
    pub chain: ChainId,
    /// Queue position of `chain`; lower goes first.
    pub rank: usize,
}

/// Greedy by rank: a proposal survives iff it shares no edge and no junction with an
/// accepted loop and none of its junctions is in `crossed_junctions`. Returns the
/// indices of the survivors in acceptance order.
pub fn resolve_cycle_conflicts(
    graph: &ArchGraph,
    proposals: &[CycleProposal],
    crossed_junctions: &[usize],
) -> Vec<usize> {
    let mut res = Reservations::new(graph);
    for &x in crossed_junctions {
        res.junctions[x] = true;
    }
    let mut order: Vec<usize> = (0..proposals.len()).collect();
    order.sort_by_key(|&i| (proposals[i].rank, i));
    let mut accepted = Vec::new();
    for i in order {
        if res.admits(graph, &proposals[i].cycle) {
            res.reserve(graph, &proposals[i].cycle);
            accepted.push(i);
        }
    }
    accepted
}

struct StepCtx {
    res: Reservations,
    crossed: Vec<bool>,
    step: TimeStep,
}

impl<T: Scalar> SystemState<'_, T> {
    /// Single move onto a free adjacent edge, recording any junction crossing.
    fn hop(&mut self, ctx: &mut StepCtx, chain: ChainId, to: EdgeId) -> Result<()> {
        let from = self.placement.edge_of(chain);
        let x = self
            .graph
            .shared_node(from, to)
            .expect("scheduler only moves between adjacent edges");
        if self.graph.is_major(x) {
            debug_assert!(!ctx.res.junctions[x] && !ctx.crossed[chain]);
            ctx.res.junctions[x] = true;
            ctx.crossed[chain] = true;
            self.crossings[chain] += 1;
        }
        self.placement.relocate(chain, to)?;
        ctx.step.moves.push(Move { chain, from, to });
        Ok(())
    }

    fn occupied(&self, e: EdgeId) -> bool {
        self.placement.is_occupied(e)
    }

    /// First queued gate that still waits for an operand outside the processing zone:
    /// only its chains may take the entry edge.
    fn entry_candidates(&self) -> &[usize] {
        self.queue
            .gates
            .iter()
            .map(|&g| self.circuit.gate(g).qubits.as_slice())
            .find(|ops| ops.iter().any(|&c| !self.graph.in_pz_region(self.placement.edge_of(c))))
            .unwrap_or(&[])
    }

    /// Path from the exit edge to a free memory edge whose interior is fully occupied.
    /// Among all such paths, the one pushing chains that are still needed furthest
    /// from the entry wins, then the one pushing fewest chains, then the one whose end
    /// comes first in the free-edge search from `start`.
    fn departure_route(&self, start: NodeId) -> Result<Vec<EdgeId>> {
        let g = self.graph;
        let exit = g.exit_edge();
        let mut dist = g.distances_avoiding(exit, Some(g.entry_node()));
        let mut avoid = Some(g.entry_node());
        let reachable_free = |d: &[Distance]| g.memory_edges().any(|e| !self.occupied(e) && d[e].is_finite());
        if !reachable_free(&dist) {
            dist = g.distances_from(exit);
            avoid = None;
        }
        let order = g.memory_edges_by_layer(start)?;
        let mut best: Option<((u32, usize, usize), Vec<EdgeId>)> = None;
        for (rank, &f) in order.iter().enumerate() {
            if self.occupied(f) || !dist[f].is_finite() {
                continue;
            }
            let mut route = g.descend_avoiding(f, &dist, avoid);
            route.reverse();
            if route[1..route.len() - 1].iter().any(|&e| !self.occupied(e)) {
                continue;
            }
            let mut setback = 0;
            for i in 1..route.len() - 1 {
                let c = self.placement.chain_at(route[i]).expect("interior is occupied");
                if self.needed_again(c) {
                    setback += g
                        .crossings_to_entry(route[i + 1])
                        .saturating_sub(g.crossings_to_entry(route[i]));
                }
            }
            let cost = (setback, rank, route.len());
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                best = Some((cost, route));
            }
        }
        best.map(|(_, r)| r)
            .ok_or_else(|| Error::Saturation("no unoccupied memory edge reachable from the exit".into()))
    }

    /// Moves a chain out of the processing zone onto the memory zone. The chain crosses
    /// the exit junction onto the first edge of the departure route; chains on the
    /// route shift one edge forward.
    fn transit_out(&mut self, ctx: &mut StepCtx, chain: ChainId) -> Result<()> {
        let g = self.graph;
        let start = if self.needed_again(chain) {
            g.exit_node()
        } else {
            self.far_node
        };
        let route = self.departure_route(start)?;
        for i in (1..route.len() - 1).rev() {
            let c = self.placement.chain_at(route[i]).expect("occupied route edge");
            self.hop(ctx, c, route[i + 1])?;
        }
        if self.placement.edge_of(chain) == g.entry_edge() {
            self.hop(ctx, chain, g.processing_edge())?;
        }
        self.hop(ctx, chain, g.exit_edge())?;
        self.hop(ctx, chain, route[1])
    }

    fn pz_transit(&mut self, ctx: &mut StepCtx) -> Result<()> {
        if self.active.is_some() {
            return Ok(());
        }
        let Some(&next) = self.queue.gates.first() else {
            return Ok(());
        };
        let g = self.graph;
        let ops = &self.circuit.gate(next).qubits;
        let waits_outside = ops.iter().any(|&c| !g.in_pz_region(self.placement.edge_of(c)));
        let p = self.placement.chain_at(g.processing_edge());
        let e = self.placement.chain_at(g.entry_edge());
        let leaving = match (p, e) {
            (Some(p), _) if !ops.contains(&p) => Some(p),
            // the entry edge is taken by a chain the next gate does not use
            (Some(p), Some(e)) if !ops.contains(&e) && waits_outside => Some(p),
            (None, Some(e)) if !ops.contains(&e) => Some(e),
            _ => None,
        };
        if let Some(c) = leaving {
            log::trace!("step {}: chain {c} leaves the processing zone", self.clock);
            self.transit_out(ctx, c)?;
        }
        Ok(())
    }

    /// Slides a chain through minor nodes towards the entry edge, and from the entry
    /// edge onto a free processing edge.
    fn slide(&mut self, ctx: &mut StepCtx, chain: ChainId) -> Result<()> {
        let g = self.graph;
        while !self.is_locked(chain) {
            let e = self.placement.edge_of(chain);
            if e == g.entry_edge() {
                if self.active.is_none() && !self.occupied(g.processing_edge()) {
                    self.hop(ctx, chain, g.processing_edge())?;
                }
                return Ok(());
            }
            let Some(n) = g.next_toward_entry(e) else {
                return Ok(());
            };
            let x = g.shared_node(e, n).expect("adjacent");
            if g.is_major(x) || self.occupied(n) {
                return Ok(());
            }
            self.hop(ctx, chain, n)?;
        }
        Ok(())
    }

    fn slide_pass(&mut self, ctx: &mut StepCtx) -> Result<()> {
        let g = self.graph;
        if let Some(c) = self.placement.chain_at(g.entry_edge()) {
            self.slide(ctx, c)?;
        }
        let mut chains = self.queue.chains.clone();
        chains.sort_by_key(|&c| (g.distance_to_entry(self.placement.edge_of(c)), c));
        for c in chains {
            self.slide(ctx, c)?;
        }
        Ok(())
    }

    /// Rotates a loop if none of its junctions or edges is taken this step and no
    /// occupant would cross a second junction.
    fn try_rotate(&mut self, ctx: &mut StepCtx, cycle: &Cycle) -> Result<bool> {
        let g = self.graph;
        if !ctx.res.admits(g, cycle) {
            return Ok(false);
        }
        let mut moves = Vec::new();
        for (from, to, x) in cycle.hops(g) {
            if let Some(c) = self.placement.chain_at(from) {
                if self.is_locked(c) || (g.is_major(x) && ctx.crossed[c]) {
                    return Ok(false);
                }
                moves.push((c, from, to, g.is_major(x)));
            }
        }
        let targets: Vec<(ChainId, EdgeId)> = moves.iter().map(|&(c, _, to, _)| (c, to)).collect();
        self.placement.relocate_all(&targets)?;
        for &(c, from, to, major) in &moves {
            if major {
                ctx.crossed[c] = true;
                self.crossings[c] += 1;
            }
            ctx.step.moves.push(Move { chain: c, from, to });
        }
        ctx.res.reserve(g, cycle);
        ctx.step.cycles.push(cycle.edges.clone());
        Ok(true)
    }

    fn crossing_phase(&mut self, ctx: &mut StepCtx) -> Result<()> {
        let g = self.graph;
        let movers = eligible_movers(&self.queue, &self.placement, g);
        for c in movers {
            if self.is_locked(c) || ctx.crossed[c] {
                continue;
            }
            let e = self.placement.edge_of(c);
            if !g.is_memory(e) {
                continue;
            }
            let Some(n) = g.next_toward_entry(e) else {
                continue;
            };
            let x = g.shared_node(e, n).expect("adjacent");
            if n == g.entry_edge() {
                if self.active.is_none()
                    && !self.occupied(n)
                    && !ctx.res.junctions[x]
                    && self.entry_candidates().contains(&c)
                {
                    self.hop(ctx, c, n)?;
                }
                continue;
            }
            if !self.occupied(n) {
                if !g.is_major(x) || !ctx.res.junctions[x] {
                    self.hop(ctx, c, n)?;
                }
                continue;
            }
            if let Ok(cycle) = g.find_cycle(e, n) {
                if self.try_rotate(ctx, &cycle)? {
                    log::trace!("step {}: chain {c} rotates {:?}", self.clock, cycle.edges);
                }
            }
        }
        Ok(())
    }

    fn startable(&self, gate: usize) -> bool {
        let g = self.graph;
        let ops = &self.circuit.gate(gate).qubits;
        self.dag.in_front(gate)
            && ops.iter().all(|&c| g.in_pz_region(self.placement.edge_of(c)))
            && self
                .placement
                .chain_at(g.processing_edge())
                .is_some_and(|p| ops.contains(&p))
    }

    fn gate_phase(&mut self, ctx: &mut StepCtx) -> bool {
        let mut changed = false;
        if self.active.is_none() {
            let preferred = self.queue.gates.first().copied();
            let start = preferred
                .filter(|&gate| self.startable(gate))
                .or_else(|| self.dag.front().find(|&gate| self.startable(gate)));
            if let Some(gate) = start {
                self.active = Some(ActiveGate {
                    gate,
                    remaining: self.cfg.duration(self.circuit, gate),
                    started: self.clock,
                });
                ctx.step.gates_started.push(gate);
                changed = true;
            }
        }
        if let Some(a) = self.active.as_mut() {
            a.remaining -= 1;
            if a.remaining == 0 {
                let gate = a.gate;
                self.active = None;
                self.dag.remove(gate);
                for &q in &self.circuit.gate(gate).qubits {
                    self.remaining_uses[q] = self.remaining_uses[q].saturating_sub(1);
                }
                ctx.step.gates_finished.push(gate);
                changed = true;
            }
        }
        changed
    }
}

pub(super) fn advance<T: Scalar>(state: &mut SystemState<'_, T>) -> Result<TimeStep> {
    if state.cfg.recompute_queue_each_step {
        state.rebuild_queue();
    }
    let mut ctx = StepCtx {
        res: Reservations::new(state.graph),
        crossed: vec![false; state.placement.chain_count()],
        step: TimeStep {
            index: state.clock,
            ..Default::default()
        },
    };
    state.pz_transit(&mut ctx)?;
    state.slide_pass(&mut ctx)?;
    state.crossing_phase(&mut ctx)?;
    state.slide_pass(&mut ctx)?;
    if state.gate_phase(&mut ctx) {
        state.rebuild_queue();
    }
    state.clock += 1;
    Ok(ctx.step)
}
