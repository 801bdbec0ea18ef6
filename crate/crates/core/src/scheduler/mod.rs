//! Time-stepped shuttling scheduler.
//!
//! Each step runs, in order: processing-zone transit, intra-segment slides of queued
//! chains, junction crossings and cycle rotations in queue order, a second slide
//! pass, and finally gate start / timer / completion.

mod format;
mod step;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arch::{ArchGraph, EdgeId, NodeId};
use crate::circuit::{Circuit, DependencyGraph, GateId, RemainingDag};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::selection::{build_priority_queue, ChainId, IonPlacement, PriorityQueue};

pub use format::{circuit_hash, ScheduleFile, ScheduleHeader};
pub use step::{eligible_movers, resolve_cycle_conflicts, CycleProposal};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerConfig {
    pub duration_1q: u32,
    pub duration_2q: u32,
    /// Priority-queue length; `pz_capacity + 2` when unset.
    pub max_queue_len: Option<usize>,
    pub recompute_queue_each_step: bool,
    /// Step bound before giving up; `50 * gates * diameter` when unset.
    pub max_steps_guard: Option<usize>,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            duration_1q: 1,
            duration_2q: 1,
            max_queue_len: None,
            recompute_queue_each_step: false,
            max_steps_guard: None,
        }
    }
}

impl SchedulerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.duration_1q == 0 {
            return Err(Error::validation("duration_1q", "must be at least 1"));
        }
        if self.duration_2q == 0 {
            return Err(Error::validation("duration_2q", "must be at least 1"));
        }
        if self.max_queue_len == Some(0) {
            return Err(Error::validation("max_queue_len", "must be at least 1"));
        }
        if self.max_steps_guard == Some(0) {
            return Err(Error::validation("max_steps_guard", "must be at least 1"));
        }
        Ok(())
    }

    pub fn duration<T: Scalar>(&self, circuit: &Circuit<T>, g: GateId) -> u32 {
        if circuit.gate(g).is_two_qubit() {
            self.duration_2q
        } else {
            self.duration_1q
        }
    }

    fn queue_len(&self, graph: &ArchGraph) -> usize {
        self.max_queue_len.unwrap_or(graph.spec().pz_capacity + 2)
    }

    fn guard(&self, graph: &ArchGraph, gates: usize) -> usize {
        self.max_steps_guard
            .unwrap_or_else(|| 50 * gates.max(1) * graph.diameter().max(1) as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub chain: ChainId,
    pub from: EdgeId,
    pub to: EdgeId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeStep {
    pub index: usize,
    pub moves: Vec<Move>,
    /// Rotated loops, each listed in rotation order.
    pub cycles: Vec<Vec<EdgeId>>,
    pub gates_started: Vec<GateId>,
    pub gates_finished: Vec<GateId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(rename = "T_hat")]
    pub t_hat: usize,
    #[serde(rename = "G")]
    pub gates: usize,
    pub per_chain_crossings: Vec<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub steps: Vec<TimeStep>,
    pub summary: Summary,
}

impl Schedule {
    /// Gate ids in completion order.
    pub fn finish_order(&self) -> Vec<GateId> {
        self.steps
            .iter()
            .flat_map(|s| s.gates_finished.iter().copied())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActiveGate {
    pub gate: GateId,
    /// Steps still to run, counting the current one.
    pub remaining: u32,
    pub started: usize,
}

/// Everything that changes from one time step to the next.
#[derive(Debug, Clone)]
pub struct SystemState<'a, T> {
    pub graph: &'a ArchGraph,
    pub circuit: &'a Circuit<T>,
    pub cfg: SchedulerConfig,
    pub placement: IonPlacement,
    pub dag: RemainingDag<'a>,
    pub queue: PriorityQueue,
    pub active: Option<ActiveGate>,
    pub clock: usize,
    pub crossings: Vec<u64>,
    /// Unfinished gates per qubit.
    remaining_uses: Vec<usize>,
    /// Start node of the free-edge search for chains that are done.
    far_node: NodeId,
}

impl<'a, T: Scalar> SystemState<'a, T> {
    pub fn new(
        graph: &'a ArchGraph,
        circuit: &'a Circuit<T>,
        dag: &'a DependencyGraph,
        initial: IonPlacement,
        cfg: SchedulerConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if !circuit.is_native() {
            return Err(Error::validation(
                "circuit",
                "scheduler expects a native circuit; compile it first",
            ));
        }
        if dag.len() != circuit.len() {
            return Err(Error::validation(
                "circuit",
                "dependency graph does not match the circuit",
            ));
        }
        let placement = initial.attach(graph)?;
        if circuit.qubit_count() > placement.chain_count() {
            return Err(Error::validation(
                "placement",
                format!(
                    "{} qubits but only {} chains",
                    circuit.qubit_count(),
                    placement.chain_count()
                ),
            ));
        }
        if graph.spec().pz_capacity < 2 && circuit.gates().iter().any(|g| g.is_two_qubit()) {
            return Err(Error::validation(
                "pz_capacity",
                "two-qubit gates need a processing zone of capacity 2",
            ));
        }
        let in_memory = placement.edges().iter().filter(|&&e| graph.is_memory(e)).count();
        if !circuit.is_empty() && in_memory >= graph.memory_edge_count() {
            return Err(Error::Saturation(format!(
                "{} chains fill all {} memory edges",
                in_memory,
                graph.memory_edge_count()
            )));
        }
        let mut remaining_uses = vec![0; placement.chain_count()];
        for g in circuit.gates() {
            for &q in &g.qubits {
                remaining_uses[q] += 1;
            }
        }
        let far_node = graph.farthest_major(&[graph.exit_node(), graph.entry_node()]);
        let mut state = SystemState {
            graph,
            circuit,
            crossings: vec![0; placement.chain_count()],
            placement,
            dag: RemainingDag::new(dag),
            queue: PriorityQueue::default(),
            active: None,
            clock: 0,
            cfg,
            remaining_uses,
            far_node,
        };
        state.rebuild_queue();
        Ok(state)
    }

    pub fn is_done(&self) -> bool {
        self.dag.is_empty() && self.active.is_none()
    }

    /// Rebuilds the priority queue from the unfinished gates, leaving out the running one.
    pub fn rebuild_queue(&mut self) {
        let mut work = self.dag.clone();
        if let Some(a) = self.active {
            work.remove(a.gate);
        }
        let len = self.cfg.queue_len(self.graph);
        self.queue = build_priority_queue(&work, self.circuit, &self.placement, self.graph, len);
    }

    pub fn is_locked(&self, chain: ChainId) -> bool {
        self.active
            .is_some_and(|a| a.started < self.clock && self.circuit.gate(a.gate).acts_on(chain))
    }

    fn needed_again(&self, chain: ChainId) -> bool {
        self.remaining_uses.get(chain).is_some_and(|&n| n > 0)
    }

    /// Short textual state used in livelock reports.
    pub fn dump(&self) -> String {
        let front: Vec<GateId> = self.dag.front().collect();
        format!(
            "clock={} placement={:?} queue={:?} queue_gates={:?} front={:?} active={:?}",
            self.clock,
            self.placement.edges(),
            self.queue.chains,
            self.queue.gates,
            front,
            self.active
        )
    }
}

/// Runs one time step and returns its record.
pub fn advance_time_step<T: Scalar>(state: &mut SystemState<'_, T>) -> Result<TimeStep> {
    step::advance(state)
}

/// Schedules `circuit` from `initial` until every gate has run.
pub fn run_schedule<T: Scalar>(
    graph: &ArchGraph,
    circuit: &Circuit<T>,
    initial: &IonPlacement,
    cfg: &SchedulerConfig,
) -> Result<Schedule> {
    let dag = DependencyGraph::build(circuit);
    let mut state = SystemState::new(graph, circuit, &dag, initial.clone(), cfg.clone())?;
    let guard = cfg.guard(graph, circuit.len());
    let mut steps = Vec::new();
    while !state.is_done() {
        if steps.len() >= guard {
            return Err(Error::Livelock {
                steps: steps.len(),
                dump: state.dump(),
            });
        }
        steps.push(advance_time_step(&mut state)?);
    }
    log::debug!("scheduled {} gates in {} steps", circuit.len(), steps.len());
    Ok(Schedule {
        summary: Summary {
            t_hat: steps.len(),
            gates: circuit.len(),
            per_chain_crossings: state.crossings,
        },
        steps,
    })
}

/// Crossings per chain counted from a schedule's moves.
pub fn count_crossings(graph: &ArchGraph, chains: usize, steps: &[TimeStep]) -> Vec<u64> {
    let mut counts: BTreeMap<ChainId, u64> = BTreeMap::new();
    for m in steps.iter().flat_map(|s| &s.moves) {
        if graph.shared_node(m.from, m.to).is_some_and(|x| graph.is_major(x)) {
            *counts.entry(m.chain).or_default() += 1;
        }
    }
    (0..chains).map(|c| counts.get(&c).copied().unwrap_or(0)).collect()
}
