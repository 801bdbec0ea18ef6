//! Seeded random placements and exact minimum schedule lengths for
//! full-register-access on small grids.
//!
//! The search runs A* over `(unprocessed-chain edges, processed-chain edges, gate timer)`.
//! One time step is expanded by a depth-first closure over atomic actions: a chain hops
//! onto a free adjacent edge (any number of minor-node hops, at most one junction per
//! chain, every junction at most once), or a completely occupied loop rotates by one.
//! Any legal step is a sequence of such actions, so the closure yields every state
//! reachable in one step.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arch::{ArchGraph, EdgeId, EdgeTag, NodeId};
use crate::error::{Error, Result};
use crate::scheduler::{count_crossings, Move, Schedule, SchedulerConfig, Summary, TimeStep};
use crate::selection::IonPlacement;

pub const DEFAULT_BUDGET: usize = 10_000_000;

/// `chain_count` distinct memory edges drawn uniformly with a ChaCha8 stream seeded by `seed`.
pub fn random_placement(graph: &ArchGraph, chain_count: usize, seed: u64) -> Result<IonPlacement> {
    if chain_count > graph.memory_edge_count() {
        return Err(Error::validation(
            "chain_count",
            format!(
                "{chain_count} chains do not fit on {} memory edges",
                graph.memory_edge_count()
            ),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = rand::seq::index::sample(&mut rng, graph.memory_edge_count(), chain_count).into_vec();
    IonPlacement::new(graph, edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub t_min: usize,
    /// Verifier-clean schedule of length `t_min` for `fra(qubits)`.
    pub witness: Schedule,
    pub states_explored: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Key {
    todo: u64,
    done: u64,
    /// Steps the running gate still needs after the current one.
    timer: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Inner {
    todo: u64,
    done: u64,
    /// Edges whose chain already crossed a junction this step.
    crossed: u64,
    junctions: u64,
}

#[derive(Debug, Clone, Copy)]
enum Action {
    Hop(EdgeId, EdgeId),
    Rotate(usize),
}

struct Model<'a> {
    graph: &'a ArchGraph,
    /// `(to, junction bit or 0)` for every legal single hop.
    hops: Vec<Vec<(EdgeId, u64)>>,
    /// Loops in rotation order with their edge mask.
    loops: Vec<(Vec<EdgeId>, u64)>,
    processing: EdgeId,
    /// Lower bound on steps until a chain on each edge can finish its gate.
    bound: Vec<u32>,
    duration: u32,
}

fn bit(e: usize) -> u64 {
    1u64 << e
}

fn forward(graph: &ArchGraph, from: EdgeId, to: EdgeId) -> bool {
    use EdgeTag::*;
    matches!(
        (graph.tag(from), graph.tag(to)),
        (Memory, Memory) | (Memory, Entry) | (Entry, Processing) | (Processing, Exit) | (Exit, Memory)
    )
}

/// Simple cycles of the node graph as edge loops, each in every direction the pass allows.
fn enumerate_loops(graph: &ArchGraph, limit: usize) -> Result<Vec<Vec<EdgeId>>> {
    let n = graph.node_count();
    let mut out = Vec::new();
    for s in 0..n {
        let mut stack: Vec<(NodeId, Vec<EdgeId>, Vec<NodeId>)> = vec![(s, Vec::new(), vec![s])];
        while let Some((x, edges, nodes)) = stack.pop() {
            for &e in graph.incident(x) {
                let y = graph.edges()[e].other(x);
                if y == s && edges.len() >= 2 && edges[0] != e {
                    // each undirected cycle is met twice; keep one traversal
                    if edges[0] < e {
                        let mut lp = edges.clone();
                        lp.push(e);
                        out.push(lp);
                        if out.len() > limit {
                            return Err(Error::Unsupported("too many loops for the exact search".into()));
                        }
                    }
                    continue;
                }
                if y <= s || nodes.contains(&y) {
                    continue;
                }
                let mut ne = edges.clone();
                ne.push(e);
                let mut nn = nodes.clone();
                nn.push(y);
                stack.push((y, ne, nn));
            }
        }
    }
    let mut directed = Vec::new();
    for lp in out {
        let mut rev = lp.clone();
        rev.reverse();
        for cand in [lp, rev] {
            let k = cand.len();
            if (0..k).all(|i| forward(graph, cand[i], cand[(i + 1) % k])) {
                directed.push(cand);
            }
        }
    }
    Ok(directed)
}

/// Closure state to its predecessor and the action taken from it.
type Parents = HashMap<Inner, (Inner, Action)>;

impl<'a> Model<'a> {
    fn new(graph: &'a ArchGraph, duration: u32) -> Result<Self> {
        let edges = graph.edge_count();
        let majors = graph.spec().m * graph.spec().n;
        if edges > 64 || majors > 64 {
            return Err(Error::Unsupported(format!(
                "exact search handles at most 64 edges and junctions, got {edges} and {majors}"
            )));
        }
        let mut hops = vec![Vec::new(); edges];
        for (e, list) in hops.iter_mut().enumerate() {
            let edge = &graph.edges()[e];
            for x in [edge.a, edge.b] {
                for &f in graph.incident(x) {
                    if f != e && forward(graph, e, f) {
                        let j = if graph.is_major(x) { bit(x) } else { 0 };
                        list.push((f, j));
                    }
                }
            }
            list.sort_unstable();
        }
        let loops = enumerate_loops(graph, 200_000)?
            .into_iter()
            .map(|lp| {
                let mask = lp.iter().fold(0, |m, &e| m | bit(e));
                (lp, mask)
            })
            .collect();
        let bound = (0..edges)
            .map(|e| graph.crossings_to_entry(e).max(1) + duration - 1)
            .collect();
        Ok(Model {
            graph,
            hops,
            loops,
            processing: graph.processing_edge(),
            bound,
            duration,
        })
    }

    /// Earliest makespan if every pending gate only had to wait for its chain and for
    /// the gates finishing before it.
    fn heuristic(&self, k: &Key) -> u32 {
        let mut lows: Vec<u32> = (0..64)
            .filter(|&e| k.todo & bit(e) != 0)
            .map(|e| self.bound[e])
            .collect();
        lows.sort_unstable();
        let mut t = k.timer;
        for a in lows {
            t = a.max(t + self.duration);
        }
        t
    }

    fn locked(&self, k: &Key) -> u64 {
        if k.timer > 0 {
            bit(self.processing)
        } else {
            0
        }
    }

    fn hop(&self, s: &Inner, from: EdgeId, to: EdgeId, j: u64) -> Inner {
        let (fb, tb) = (bit(from), bit(to));
        let mv = |m: u64| if m & fb != 0 { (m & !fb) | tb } else { m };
        let mut crossed = mv(s.crossed);
        if j != 0 {
            crossed |= tb;
        }
        Inner {
            todo: mv(s.todo),
            done: mv(s.done),
            crossed,
            junctions: s.junctions | j,
        }
    }

    fn rotate(&self, s: &Inner, lp: &[EdgeId]) -> Option<Inner> {
        let n = lp.len();
        let mut next = Inner {
            todo: 0,
            done: 0,
            crossed: 0,
            junctions: s.junctions,
        };
        let rest = |m: u64| lp.iter().fold(m, |m, &e| m & !bit(e));
        next.todo = rest(s.todo);
        next.done = rest(s.done);
        next.crossed = rest(s.crossed);
        for i in 0..n {
            let (a, b) = (lp[i], lp[(i + 1) % n]);
            let x = self.graph.shared_node(a, b).expect("loop edges touch");
            let crosses = self.graph.is_major(x);
            if crosses && (s.crossed & bit(a) != 0 || s.junctions & bit(x) != 0) {
                return None;
            }
            if crosses {
                next.junctions |= bit(x);
                next.crossed |= bit(b);
            } else if s.crossed & bit(a) != 0 {
                next.crossed |= bit(b);
            }
            if s.todo & bit(a) != 0 {
                next.todo |= bit(b);
            } else {
                next.done |= bit(b);
            }
        }
        Some(next)
    }

    /// Every state reachable within one step, optionally with the action path to it.
    /// Fails once more than `limit` states have been reached.
    fn closure(&self, k: &Key, record: bool, limit: usize) -> Result<(Vec<Inner>, Parents)> {
        let start = Inner {
            todo: k.todo,
            done: k.done,
            crossed: 0,
            junctions: 0,
        };
        let locked = self.locked(k);
        let mut seen: Parents = HashMap::new();
        let mut order = vec![start];
        let mut stack = vec![start];
        let mut visited = std::collections::HashSet::new();
        visited.insert(start);
        while let Some(s) = stack.pop() {
            if order.len() > limit {
                return Err(Error::Budget {
                    budget: limit,
                    explored: order.len(),
                    frontier: stack.len(),
                });
            }
            let occ = s.todo | s.done;
            let mut push = |n: Inner, a: Action, seen: &mut Parents| {
                if visited.insert(n) {
                    if record {
                        seen.insert(n, (s, a));
                    }
                    order.push(n);
                    stack.push(n);
                }
            };
            let mut rest = occ & !locked;
            while rest != 0 {
                let e = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                for &(f, j) in &self.hops[e] {
                    if occ & bit(f) != 0 {
                        continue;
                    }
                    if j != 0 && (s.junctions & j != 0 || s.crossed & bit(e) != 0) {
                        continue;
                    }
                    push(self.hop(&s, e, f, j), Action::Hop(e, f), &mut seen);
                }
            }
            for (i, (lp, mask)) in self.loops.iter().enumerate() {
                if occ & mask == *mask && locked & mask == 0 {
                    if let Some(n) = self.rotate(&s, lp) {
                        push(n, Action::Rotate(i), &mut seen);
                    }
                }
            }
        }
        Ok((order, seen))
    }

    /// End-of-step keys for one closure state: gate decisions and timer bookkeeping.
    fn finish_step(&self, k: &Key, s: &Inner, out: &mut Vec<(Key, bool)>) {
        let p = bit(self.processing);
        if k.timer > 0 {
            out.push((
                Key {
                    todo: s.todo,
                    done: s.done,
                    timer: k.timer - 1,
                },
                false,
            ));
            return;
        }
        let idle = Key {
            todo: s.todo,
            done: s.done,
            timer: 0,
        };
        if s.todo & p != 0 {
            let started = Key {
                todo: s.todo & !p,
                done: s.done | p,
                timer: self.duration - 1,
            };
            out.push((started, true));
            if self.duration > 1 {
                out.push((idle, false));
            }
        } else {
            out.push((idle, false));
        }
    }
}

/// Minimum number of time steps to run `RX` on each of the first `qubits` chains,
/// by exhaustive A* search within `budget` distinct states.
pub fn optimal_schedule_length(
    graph: &ArchGraph,
    initial: &IonPlacement,
    qubits: usize,
    cfg: &SchedulerConfig,
    budget: usize,
) -> Result<OracleResult> {
    cfg.validate()?;
    let placement = initial.clone().attach(graph)?;
    if qubits > placement.chain_count() {
        return Err(Error::validation("placement", "fewer chains than qubits"));
    }
    let model = Model::new(graph, cfg.duration_1q)?;
    let mut start = Key {
        todo: 0,
        done: 0,
        timer: 0,
    };
    for (c, &e) in placement.edges().iter().enumerate() {
        if c < qubits {
            start.todo |= bit(e);
        } else {
            start.done |= bit(e);
        }
    }

    let mut keys: Vec<(Key, u32, u32)> = vec![(start, 0, u32::MAX)];
    let mut index: HashMap<Key, u32> = HashMap::from([(start, 0)]);
    let mut closed = vec![false];
    let mut open = BinaryHeap::new();
    open.push(Reverse((model.heuristic(&start), Reverse(0u32), 0u32)));
    let mut goal = None;
    let mut ends = Vec::new();
    while let Some(Reverse((_, Reverse(g), id))) = open.pop() {
        let id_us = id as usize;
        if closed[id_us] || keys[id_us].1 != g {
            continue;
        }
        closed[id_us] = true;
        let k = keys[id_us].0;
        if k.todo == 0 && k.timer == 0 {
            goal = Some(id_us);
            break;
        }
        let (states, _) = model.closure(&k, false, budget)?;
        ends.clear();
        for s in &states {
            model.finish_step(&k, s, &mut ends);
        }
        for &(nk, _) in &ends {
            let ng = g + 1;
            match index.entry(nk) {
                Entry::Occupied(o) => {
                    let j = *o.get() as usize;
                    if !closed[j] && ng < keys[j].1 {
                        keys[j].1 = ng;
                        keys[j].2 = id;
                        open.push(Reverse((ng + model.heuristic(&nk), Reverse(ng), j as u32)));
                    }
                }
                Entry::Vacant(v) => {
                    if keys.len() >= budget {
                        return Err(Error::Budget {
                            budget,
                            explored: keys.len(),
                            frontier: open.len(),
                        });
                    }
                    let j = keys.len() as u32;
                    v.insert(j);
                    keys.push((nk, ng, id));
                    closed.push(false);
                    open.push(Reverse((ng + model.heuristic(&nk), Reverse(ng), j)));
                }
            }
        }
    }
    let goal = goal.ok_or_else(|| Error::Unsupported("no schedule completes the circuit".into()))?;

    let mut path = vec![goal];
    while keys[*path.last().unwrap()].2 != u32::MAX {
        path.push(keys[*path.last().unwrap()].2 as usize);
    }
    path.reverse();
    let key_path: Vec<Key> = path.iter().map(|&i| keys[i].0).collect();
    let witness = build_witness(&model, &placement, qubits, &key_path)?;
    Ok(OracleResult {
        t_min: key_path.len() - 1,
        witness,
        states_explored: keys.len(),
    })
}

/// Replays the optimal key sequence with concrete chain ids.
fn build_witness(model: &Model<'_>, initial: &IonPlacement, qubits: usize, keys: &[Key]) -> Result<Schedule> {
    let graph = model.graph;
    let mut at: Vec<Option<usize>> = vec![None; graph.edge_count()];
    for (c, &e) in initial.edges().iter().enumerate() {
        at[e] = Some(c);
    }
    let mut steps = Vec::new();
    let mut running: Option<(usize, u32)> = None;
    for (t, pair) in keys.windows(2).enumerate() {
        let (from, to) = (pair[0], pair[1]);
        let (states, parents) = model.closure(&from, true, usize::MAX)?;
        let mut found = None;
        for s in &states {
            let mut ends = Vec::new();
            model.finish_step(&from, s, &mut ends);
            if let Some(&(_, started)) = ends.iter().find(|(k, _)| *k == to) {
                found = Some((*s, started));
                break;
            }
        }
        let (end, started) = found.ok_or_else(|| Error::Schedule("witness step not reproducible".into()))?;
        let mut actions = Vec::new();
        let mut cur = end;
        while let Some(&(prev, a)) = parents.get(&cur) {
            actions.push(a);
            cur = prev;
        }
        actions.reverse();
        let mut step = TimeStep {
            index: t,
            ..Default::default()
        };
        for a in actions {
            match a {
                Action::Hop(e, f) => {
                    let c = at[e].take().expect("hop from occupied edge");
                    at[f] = Some(c);
                    step.moves.push(Move {
                        chain: c,
                        from: e,
                        to: f,
                    });
                }
                Action::Rotate(i) => {
                    let lp = &model.loops[i].0;
                    let n = lp.len();
                    let before: Vec<Option<usize>> = lp.iter().map(|&e| at[e]).collect();
                    for k in 0..n {
                        let c = before[k].expect("full loop");
                        at[lp[(k + 1) % n]] = Some(c);
                        step.moves.push(Move {
                            chain: c,
                            from: lp[k],
                            to: lp[(k + 1) % n],
                        });
                    }
                    step.cycles.push(lp.clone());
                }
            }
        }
        if started {
            let c = at[model.processing].expect("gate needs a chain");
            debug_assert!(c < qubits);
            step.gates_started.push(c);
            running = Some((c, model.duration));
        }
        if let Some((c, left)) = running.as_mut() {
            *left -= 1;
            if *left == 0 {
                step.gates_finished.push(*c);
                running = None;
            }
        }
        steps.push(step);
    }
    let per_chain_crossings = count_crossings(graph, initial.chain_count(), &steps);
    Ok(Schedule {
        summary: Summary {
            t_hat: steps.len(),
            gates: qubits,
            per_chain_crossings,
        },
        steps,
    })
}
