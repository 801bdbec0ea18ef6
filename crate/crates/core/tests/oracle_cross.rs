//! Exhaustive breadth-first search over whole-step move sets, written against the
//! movement rules directly, compared with the oracle on small grids.

use std::collections::HashSet;

use qccd_shuttle::arch::EdgeTag;
use qccd_shuttle::circuit::fra;
use qccd_shuttle::oracle::{optimal_schedule_length, DEFAULT_BUDGET};
use qccd_shuttle::scheduler::{run_schedule, SchedulerConfig};
use qccd_shuttle::selection::IonPlacement;
use qccd_shuttle::verify::verify_schedule;
use qccd_shuttle::{ArchGraph, GridSpec};

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    at: Vec<usize>,
    done: u32,
    /// Running gate's chain and the step it finishes.
    running: Option<(usize, usize)>,
}

struct Rules<'a> {
    g: &'a ArchGraph,
    /// Directed closed walks of distinct edges along legal moves.
    loops: Vec<Vec<usize>>,
}

impl<'a> Rules<'a> {
    fn new(g: &'a ArchGraph) -> Self {
        let mut r = Rules { g, loops: Vec::new() };
        for start in 0..g.edge_count() {
            r.loops_from(start, &mut vec![start]);
        }
        r
    }

    fn legal(&self, from: usize, to: usize) -> Option<usize> {
        use EdgeTag::*;
        let x = self.g.shared_node(from, to)?;
        let ok = matches!(
            (self.g.tag(from), self.g.tag(to)),
            (Memory, Memory) | (Memory, Entry) | (Entry, Processing) | (Processing, Exit) | (Exit, Memory)
        );
        ok.then_some(x)
    }

    fn next(&self, e: usize) -> Vec<(usize, usize)> {
        (0..self.g.edge_count())
            .filter(|&f| f != e)
            .filter_map(|f| self.legal(e, f).map(|x| (f, x)))
            .collect()
    }

    // loops are stored once, starting from their smallest edge
    fn loops_from(&mut self, start: usize, path: &mut Vec<usize>) {
        let last = *path.last().unwrap();
        for (f, x) in self.next(last) {
            let prev = if path.len() > 1 {
                self.g.shared_node(path[path.len() - 2], last)
            } else {
                None
            };
            if prev == Some(x) {
                continue;
            }
            if f == start && path.len() >= 3 {
                if self.legal(last, start) != self.g.shared_node(start, path[1]) {
                    self.loops.push(path.clone());
                }
            } else if f > start && !path.contains(&f) {
                path.push(f);
                self.loops_from(start, path);
                path.pop();
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Inner {
    at: Vec<usize>,
    junctions: u64,
    crossed: u32,
}

/// Every placement reachable within one step.
fn step_closure(r: &Rules, s: &State, locked: Option<usize>) -> HashSet<Vec<usize>> {
    let mut seen = HashSet::new();
    let start = Inner {
        at: s.at.clone(),
        junctions: 0,
        crossed: 0,
    };
    let mut stack = vec![start.clone()];
    seen.insert(start);
    let free = |at: &[usize], e: usize| !at.contains(&e);
    while let Some(cur) = stack.pop() {
        let mut succ = Vec::new();
        for c in 0..cur.at.len() {
            if Some(c) == locked {
                continue;
            }
            for (f, x) in r.next(cur.at[c]) {
                if !free(&cur.at, f) {
                    continue;
                }
                let mut n = cur.clone();
                n.at[c] = f;
                if r.g.is_major(x) {
                    if cur.junctions & (1 << x) != 0 || cur.crossed & (1 << c) != 0 {
                        continue;
                    }
                    n.junctions |= 1 << x;
                    n.crossed |= 1 << c;
                }
                succ.push(n);
            }
        }
        'rot: for lp in &r.loops {
            let k = lp.len();
            let mut owners = Vec::with_capacity(k);
            for &e in lp {
                match cur.at.iter().position(|&a| a == e) {
                    Some(c) if Some(c) != locked => owners.push(c),
                    _ => continue 'rot,
                }
            }
            let mut n = cur.clone();
            for i in 0..k {
                let (c, to) = (owners[i], lp[(i + 1) % k]);
                let x = r.g.shared_node(lp[i], to).unwrap();
                n.at[c] = to;
                if r.g.is_major(x) {
                    if n.junctions & (1 << x) != 0 || n.crossed & (1 << c) != 0 {
                        continue 'rot;
                    }
                    n.junctions |= 1 << x;
                    n.crossed |= 1 << c;
                }
            }
            succ.push(n);
        }
        for n in succ {
            if seen.insert(n.clone()) {
                stack.push(n);
            }
        }
    }
    seen.into_iter().map(|i| i.at).collect()
}

fn exhaustive_t_min(g: &ArchGraph, initial: &[usize], duration: usize) -> usize {
    let r = Rules::new(g);
    let chains = initial.len();
    let all = (1u32 << chains) - 1;
    let p = g.processing_edge();
    let mut frontier = HashSet::from([State {
        at: initial.to_vec(),
        done: 0,
        running: None,
    }]);
    for t in 0.. {
        if frontier.iter().any(|s| s.done == all && s.running.is_none()) {
            return t;
        }
        assert!(t < 64, "search did not terminate");
        let mut next = HashSet::new();
        for s in &frontier {
            // a running gate locks its chain from the step after it started
            let locked = s.running.map(|(c, _)| c);
            for at in step_closure(&r, s, locked) {
                let mut base = State {
                    at,
                    done: s.done,
                    running: s.running,
                };
                if let Some((_, f)) = base.running {
                    if f == t {
                        base.running = None;
                    }
                }
                let running_now = s.running.is_some_and(|(_, f)| f >= t);
                if !running_now {
                    if let Some(c) = base.at.iter().position(|&e| e == p) {
                        if base.done & (1 << c) == 0 {
                            let mut started = base.clone();
                            started.done |= 1 << c;
                            if duration > 1 {
                                started.running = Some((c, t + duration - 1));
                            }
                            next.insert(started);
                        }
                    }
                }
                next.insert(base);
            }
        }
        frontier = next;
    }
    unreachable!()
}

fn placements(g: &ArchGraph, chains: usize) -> Vec<Vec<usize>> {
    let edges: Vec<usize> = g.memory_edges().collect();
    let mut out = vec![vec![]];
    for _ in 0..chains {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                edges
                    .iter()
                    .filter(|e| !p.contains(e))
                    .map(|&e| [p.clone(), vec![e]].concat())
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

fn compare(spec: GridSpec, chains: usize, duration: u32) {
    let g = ArchGraph::build(spec).unwrap();
    let cfg = SchedulerConfig {
        duration_1q: duration,
        ..Default::default()
    };
    let circuit = fra::<f64>(chains);
    for edges in placements(&g, chains) {
        let p = IonPlacement::new(&g, edges.clone()).unwrap();
        let expected = exhaustive_t_min(&g, &edges, duration as usize);
        let got = optimal_schedule_length(&g, &p, chains, &cfg, DEFAULT_BUDGET).unwrap();
        assert_eq!(got.t_min, expected, "placement {edges:?}");
        assert!(verify_schedule(&g, &circuit, &p, &got.witness, &cfg).is_empty());
        assert_eq!(got.witness.steps.len(), expected);
        let t_hat = run_schedule(&g, &circuit, &p, &cfg).unwrap().summary.t_hat;
        assert!(
            t_hat >= expected,
            "placement {edges:?}: T_hat {t_hat} < T_min {expected}"
        );
    }
}

#[test]
fn two_chains_on_the_smallest_grid() {
    compare(GridSpec::new(2, 2, 1, 1), 2, 1);
}

#[test]
fn two_chains_with_long_gates() {
    compare(GridSpec::new(2, 2, 1, 1), 2, 2);
}

#[test]
fn three_chains_on_a_short_racetrack() {
    compare(GridSpec::new(2, 2, 1, 2), 3, 1);
}

#[test]
fn three_chains_on_the_smallest_grid() {
    compare(GridSpec::new(2, 2, 1, 1), 3, 1);
}
