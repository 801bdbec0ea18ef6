//! Independent replay of a schedule against the movement and gate rules.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arch::{ArchGraph, EdgeId, EdgeTag};
use crate::circuit::{Circuit, DependencyGraph, GateId};
use crate::scalar::Scalar;
use crate::scheduler::{Move, Schedule, SchedulerConfig, TimeStep};
use crate::selection::{ChainId, IonPlacement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    Occupancy,
    JunctionReuse,
    NonAdjacentMove,
    GateOrder,
    GateLocation,
    Incomplete,
}

impl Rule {
    pub const ALL: [Rule; 6] = [
        Rule::Occupancy,
        Rule::JunctionReuse,
        Rule::NonAdjacentMove,
        Rule::GateOrder,
        Rule::GateLocation,
        Rule::Incomplete,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Rule::Occupancy => "OCCUPANCY",
            Rule::JunctionReuse => "JUNCTION_REUSE",
            Rule::NonAdjacentMove => "NON_ADJACENT_MOVE",
            Rule::GateOrder => "GATE_ORDER",
            Rule::GateLocation => "GATE_LOCATION",
            Rule::Incomplete => "INCOMPLETE",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub step: usize,
    pub rule: Rule,
    pub description: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.violations.iter().filter(|v| v.rule == rule).count()
    }

    pub fn rules(&self) -> BTreeSet<Rule> {
        self.violations.iter().map(|v| v.rule).collect()
    }

    /// One line per violation: `step <i> <RULE> <description>`.
    pub fn to_text(&self) -> String {
        self.violations
            .iter()
            .map(|v| format!("step {} {} {}\n", v.step, v.rule, v.description))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy)]
struct Running {
    gate: GateId,
    started: usize,
    finishes: usize,
}

struct Replay<'a, T> {
    graph: &'a ArchGraph,
    circuit: &'a Circuit<T>,
    dag: DependencyGraph,
    cfg: &'a SchedulerConfig,
    at: Vec<EdgeId>,
    count: Vec<usize>,
    started: Vec<Option<usize>>,
    finished: Vec<Option<usize>>,
    running: Option<Running>,
    report: ViolationReport,
}

impl<T: Scalar> Replay<'_, T> {
    fn flag(&mut self, step: usize, rule: Rule, description: String) {
        self.report.violations.push(Violation {
            step,
            rule,
            description,
        });
    }

    /// Pass moves are one-way: memory -> entry -> processing -> exit -> memory.
    fn direction_ok(&self, from: EdgeId, to: EdgeId) -> bool {
        use EdgeTag::*;
        matches!(
            (self.graph.tag(from), self.graph.tag(to)),
            (Memory, Memory) | (Memory, Entry) | (Entry, Processing) | (Processing, Exit) | (Exit, Memory)
        )
    }

    fn locked(&self, step: usize, chain: ChainId) -> bool {
        self.running
            .is_some_and(|r| r.started < step && self.circuit.gate(r.gate).acts_on(chain))
    }

    /// A listed loop must run through each of its distinct edges end to end.
    fn well_formed(&self, c: &[EdgeId]) -> bool {
        let n = c.len();
        if n < 3 || c.iter().any(|&e| e >= self.graph.edge_count()) {
            return false;
        }
        let mut sorted = c.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != n {
            return false;
        }
        let joints: Option<Vec<_>> = (0..n).map(|i| self.graph.shared_node(c[i], c[(i + 1) % n])).collect();
        joints.is_some_and(|j| (0..n).all(|i| j[i] != j[(i + 1) % n]))
    }

    /// Index of the first valid listed loop that rotates `from` onto `to`.
    fn cycle_of(step: &TimeStep, valid: &[bool], m: &Move) -> Option<usize> {
        step.cycles.iter().enumerate().position(|(k, c)| {
            let n = c.len();
            valid[k] && (0..n).any(|i| c[i] == m.from && c[(i + 1) % n] == m.to)
        })
    }

    fn replay_moves(&mut self, t: usize, step: &TimeStep) {
        let valid: Vec<bool> = step.cycles.iter().map(|c| self.well_formed(c)).collect();
        for (k, _) in valid.iter().enumerate().filter(|(_, ok)| !**ok) {
            self.flag(
                t,
                Rule::NonAdjacentMove,
                format!("listed loop {k} is not a closed loop"),
            );
        }
        let mut junction_use = vec![0usize; self.graph.node_count()];
        let mut chain_crossings = vec![0usize; self.at.len()];
        let mut i = 0;
        while i < step.moves.len() {
            let batch_cycle = Self::cycle_of(step, &valid, &step.moves[i]);
            let mut j = i + 1;
            if batch_cycle.is_some() {
                while j < step.moves.len() && Self::cycle_of(step, &valid, &step.moves[j]) == batch_cycle {
                    j += 1;
                }
            }
            let mut touched = Vec::new();
            for m in &step.moves[i..j] {
                if m.chain >= self.at.len() {
                    self.flag(t, Rule::NonAdjacentMove, format!("unknown chain {}", m.chain));
                    continue;
                }
                if m.to >= self.graph.edge_count() || m.from >= self.graph.edge_count() {
                    self.flag(
                        t,
                        Rule::NonAdjacentMove,
                        format!("chain {} moves to unknown edge {}", m.chain, m.to),
                    );
                    continue;
                }
                let here = self.at[m.chain];
                if here != m.from {
                    self.flag(
                        t,
                        Rule::NonAdjacentMove,
                        format!("chain {} is on edge {here}, not {}", m.chain, m.from),
                    );
                }
                match self.graph.shared_node(here, m.to) {
                    None => self.flag(
                        t,
                        Rule::NonAdjacentMove,
                        format!("chain {}: edges {here} and {} are not adjacent", m.chain, m.to),
                    ),
                    Some(_) if !self.direction_ok(here, m.to) => self.flag(
                        t,
                        Rule::NonAdjacentMove,
                        format!(
                            "chain {}: {here} -> {} runs against the processing-zone pass",
                            m.chain, m.to
                        ),
                    ),
                    Some(x) if self.graph.is_major(x) => {
                        junction_use[x] += 1;
                        chain_crossings[m.chain] += 1;
                        if junction_use[x] == 2 {
                            self.flag(t, Rule::JunctionReuse, format!("junction {x} crossed twice"));
                        }
                        if chain_crossings[m.chain] == 2 {
                            self.flag(
                                t,
                                Rule::JunctionReuse,
                                format!("chain {} crosses two junctions", m.chain),
                            );
                        }
                    }
                    Some(_) => {}
                }
                if self.locked(t, m.chain) {
                    self.flag(
                        t,
                        Rule::GateLocation,
                        format!("chain {} moves while its gate is running", m.chain),
                    );
                }
                self.count[here] -= 1;
                self.count[m.to] += 1;
                self.at[m.chain] = m.to;
                touched.push(m.to);
            }
            touched.sort_unstable();
            touched.dedup();
            for e in touched {
                if self.count[e] > 1 {
                    self.flag(t, Rule::Occupancy, format!("{} chains on edge {e}", self.count[e]));
                }
            }
            i = j;
        }
    }

    fn replay_gates(&mut self, t: usize, step: &TimeStep) {
        let g = self.graph;
        for &gate in &step.gates_started {
            if gate >= self.circuit.len() {
                self.flag(t, Rule::GateOrder, format!("unknown gate {gate}"));
                continue;
            }
            if self.started[gate].is_some() {
                self.flag(t, Rule::GateOrder, format!("gate {gate} started twice"));
                continue;
            }
            if let Some(&p) = self
                .dag
                .preds(gate)
                .iter()
                .find(|&&p| self.finished[p].is_none_or(|f| f >= t))
            {
                self.flag(
                    t,
                    Rule::GateOrder,
                    format!("gate {gate} starts before predecessor {p} finished"),
                );
            }
            if let Some(r) = self.running {
                self.flag(
                    t,
                    Rule::GateLocation,
                    format!("gate {gate} starts while gate {} occupies the processing zone", r.gate),
                );
            }
            let ops = &self.circuit.gate(gate).qubits;
            let outside: Vec<ChainId> = ops.iter().copied().filter(|&c| !g.in_pz_region(self.at[c])).collect();
            let on_processing = ops.iter().any(|&c| self.at[c] == g.processing_edge());
            if !outside.is_empty() || !on_processing {
                self.flag(
                    t,
                    Rule::GateLocation,
                    format!("gate {gate} starts with operands outside the processing zone"),
                );
            }
            self.started[gate] = Some(t);
            let d = self.cfg.duration(self.circuit, gate) as usize;
            if self.running.is_none() {
                self.running = Some(Running {
                    gate,
                    started: t,
                    finishes: t + d - 1,
                });
            }
        }
        for &gate in &step.gates_finished {
            if gate >= self.circuit.len() {
                self.flag(t, Rule::GateOrder, format!("unknown gate {gate}"));
                continue;
            }
            if self.finished[gate].is_some() {
                self.flag(t, Rule::GateOrder, format!("gate {gate} finished twice"));
                continue;
            }
            let expected = self.started[gate].map(|s| s + self.cfg.duration(self.circuit, gate) as usize - 1);
            if expected != Some(t) {
                self.flag(t, Rule::GateOrder, format!("gate {gate} finishes at the wrong time"));
            }
            self.finished[gate] = Some(t);
            if self.running.is_some_and(|r| r.gate == gate) {
                self.running = None;
            }
        }
        if let Some(r) = self.running {
            if r.finishes <= t {
                self.flag(t, Rule::GateOrder, format!("gate {} should have finished", r.gate));
                self.running = None;
            }
        }
    }
}

/// Replays `schedule` from `initial` and lists every rule it breaks.
pub fn verify_schedule<T: Scalar>(
    graph: &ArchGraph,
    circuit: &Circuit<T>,
    initial: &IonPlacement,
    schedule: &Schedule,
    cfg: &SchedulerConfig,
) -> ViolationReport {
    let mut count = vec![0usize; graph.edge_count()];
    for &e in initial.edges() {
        if e < count.len() {
            count[e] += 1;
        }
    }
    let mut r = Replay {
        graph,
        circuit,
        dag: DependencyGraph::build(circuit),
        cfg,
        at: initial.edges().to_vec(),
        count,
        started: vec![None; circuit.len()],
        finished: vec![None; circuit.len()],
        running: None,
        report: ViolationReport::default(),
    };
    if r.at.len() < circuit.qubit_count() {
        r.flag(
            0,
            Rule::GateLocation,
            format!("{} chains for {} qubits", r.at.len(), circuit.qubit_count()),
        );
        return r.report;
    }
    for (t, step) in schedule.steps.iter().enumerate() {
        r.replay_moves(t, step);
        r.replay_gates(t, step);
    }
    let missing: Vec<GateId> = (0..circuit.len()).filter(|&g| r.finished[g].is_none()).collect();
    if !missing.is_empty() {
        r.flag(
            schedule.steps.len(),
            Rule::Incomplete,
            format!("{} gate(s) never finished, first {}", missing.len(), missing[0]),
        );
    }
    r.report
}
