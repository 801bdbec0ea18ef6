//! Shared test helpers: a dense unitary simulator and random circuits.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qccd_shuttle::circuit::{Gate, GateKind};
use qccd_shuttle::scheduler::{Move, Schedule, SchedulerConfig, Summary, TimeStep};
use qccd_shuttle::selection::IonPlacement;
use qccd_shuttle::verify::{verify_schedule, Rule, ViolationReport};
use qccd_shuttle::{ArchGraph, Circuit, GridSpec};

/// Row-major square matrix.
#[derive(Debug, Clone)]
pub struct Mat {
    pub dim: usize,
    pub data: Vec<C>,
}

impl Mat {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![C::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C::new(1.0, 0.0);
        }
        Mat { dim, data }
    }

    pub fn at(&self, r: usize, c: usize) -> C {
        self.data[r * self.dim + c]
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.dim;
        let mut data = vec![C::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.at(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    data[r * n + c] += a * o.at(k, c);
                }
            }
        }
        Mat { dim: n, data }
    }

    pub fn max_diff(&self, o: &Mat) -> f64 {
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn cis(x: f64) -> C {
    C::from_polar(1.0, x)
}

/// Local matrix of a gate; two-qubit gates use the basis `|q0 q1>` with index `2*b0 + b1`.
pub fn local_matrix(kind: GateKind, angle: f64) -> Vec<C> {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let z = C::new(0.0, 0.0);
    let o = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    match kind {
        GateKind::Rx => vec![C::new(c, 0.0), -i * s, -i * s, C::new(c, 0.0)],
        GateKind::Ry => vec![C::new(c, 0.0), C::new(-s, 0.0), C::new(s, 0.0), C::new(c, 0.0)],
        GateKind::Rz => vec![cis(-angle / 2.0), z, z, cis(angle / 2.0)],
        GateKind::H => {
            let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            vec![h, h, h, -h]
        }
        GateKind::Rzz => {
            let (a, b) = (cis(-angle / 2.0), cis(angle / 2.0));
            diag(&[a, b, b, a])
        }
        GateKind::Cp => diag(&[o, o, o, cis(angle)]),
        GateKind::Cx => vec![o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z],
        GateKind::Swap => vec![o, z, z, z, z, z, o, z, z, o, z, z, z, z, z, o],
    }
}

fn diag(d: &[C]) -> Vec<C> {
    let n = d.len();
    let mut m = vec![C::new(0.0, 0.0); n * n];
    for (k, &x) in d.iter().enumerate() {
        m[k * n + k] = x;
    }
    m
}

/// Full `2^n` matrix of one gate; qubit `q` is bit `q` of the basis index.
pub fn gate_unitary(g: &Gate<f64>, n: usize) -> Mat {
    let dim = 1 << n;
    let local = local_matrix(g.kind, g.angle.unwrap_or(0.0));
    let k = g.qubits.len();
    let ld = 1 << k;
    let local_index = |x: usize| -> usize { g.qubits.iter().fold(0, |acc, &q| (acc << 1) | ((x >> q) & 1)) };
    let mut data = vec![C::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let lc = local_index(col);
        for lr in 0..ld {
            let mut row = col;
            for (j, &q) in g.qubits.iter().enumerate() {
                let bit = (lr >> (k - 1 - j)) & 1;
                row = (row & !(1 << q)) | (bit << q);
            }
            data[row * dim + col] = local[lr * ld + lc];
        }
    }
    Mat { dim, data }
}

pub fn circuit_unitary(c: &Circuit) -> Mat {
    let n = c.qubit_count();
    c.gates()
        .iter()
        .fold(Mat::identity(1 << n), |u, g| gate_unitary(g, n).mul(&u))
}

/// Moves the content of qubit `perm[w]` onto qubit `w`.
pub fn relabel(perm: &[usize]) -> Mat {
    let n = perm.len();
    let dim = 1 << n;
    let mut data = vec![C::new(0.0, 0.0); dim * dim];
    for x in 0..dim {
        let y = (0..n).fold(0, |acc, w| acc | (((x >> perm[w]) & 1) << w));
        data[y * dim + x] = C::new(1.0, 0.0);
    }
    Mat { dim, data }
}

/// Max-norm distance between `a` and the closest global-phase multiple of `b`.
pub fn phase_distance(a: &Mat, b: &Mat) -> f64 {
    let k = (0..b.data.len())
        .max_by(|&i, &j| b.data[i].norm().total_cmp(&b.data[j].norm()))
        .expect("non-empty");
    let phase = a.data[k] / b.data[k];
    let phase = phase / phase.norm();
    let scaled = Mat {
        dim: b.dim,
        data: b.data.iter().map(|x| x * phase).collect(),
    };
    a.max_diff(&scaled)
}

pub fn commutator_norm(a: &Gate<f64>, b: &Gate<f64>, n: usize) -> f64 {
    let (ma, mb) = (gate_unitary(a, n), gate_unitary(b, n));
    ma.mul(&mb).max_diff(&mb.mul(&ma))
}

fn random_angle(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..4) {
        // exact multiples of pi/2 exercise merging and dropping
        0 => rng.gen_range(-4..=4) as f64 * PI / 2.0,
        1 => 0.0,
        _ => rng.gen_range(-2.0 * PI..2.0 * PI),
    }
}

/// Random circuit over `kinds`; two-qubit kinds are skipped on one qubit.
pub fn random_circuit(rng: &mut ChaCha8Rng, qubits: usize, gates: usize, kinds: &[GateKind]) -> Circuit {
    let mut c = Circuit::new(qubits);
    let usable: Vec<GateKind> = kinds.iter().copied().filter(|k| k.arity() <= qubits).collect();
    for _ in 0..gates {
        let kind = usable[rng.gen_range(0..usable.len())];
        let a = rng.gen_range(0..qubits);
        let ops = if kind.arity() == 2 {
            let mut b = rng.gen_range(0..qubits - 1);
            if b >= a {
                b += 1;
            }
            vec![a, b]
        } else {
            vec![a]
        };
        let angle = kind.is_parameterized().then(|| random_angle(rng));
        c.push(kind, &ops, angle).unwrap();
    }
    c
}

pub const ALL_KINDS: [GateKind; 8] = [
    GateKind::Rx,
    GateKind::Ry,
    GateKind::Rz,
    GateKind::Rzz,
    GateKind::H,
    GateKind::Cx,
    GateKind::Cp,
    GateKind::Swap,
];

pub const NATIVE_KINDS: [GateKind; 4] = [GateKind::Rx, GateKind::Ry, GateKind::Rz, GateKind::Rzz];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Crossings on a cheapest path between two edges, by 0-1 BFS over (edge, entered-at)
/// states of the raw node graph: leaving an edge through a junction costs one.
/// The processing edge is excluded.
pub fn bfs_crossings(g: &ArchGraph, from: usize, to: usize) -> u32 {
    let skip = g.processing_edge();
    let mut dist = vec![u32::MAX; g.edge_count()];
    let mut dq = VecDeque::from([(from, 0u32)]);
    dist[from] = 0;
    while let Some((e, d)) = dq.pop_front() {
        if d > dist[e] {
            continue;
        }
        let edge = &g.edges()[e];
        for x in [edge.a, edge.b] {
            let w = u32::from(g.is_major(x));
            for &f in g.incident(x) {
                if f == e || f == skip {
                    continue;
                }
                if d + w < dist[f] {
                    dist[f] = d + w;
                    if w == 0 {
                        dq.push_front((f, d));
                    } else {
                        dq.push_back((f, d + 1));
                    }
                }
            }
        }
    }
    dist[to]
}

/// A schedule with its context, built to break exactly one verifier rule
/// (`rule == None` for the clean baseline).
pub struct FaultCase {
    pub rule: Option<Rule>,
    pub graph: ArchGraph,
    pub circuit: Circuit,
    pub initial: IonPlacement,
    pub schedule: Schedule,
    pub cfg: SchedulerConfig,
}

impl FaultCase {
    pub fn report(&self) -> ViolationReport {
        verify_schedule(&self.graph, &self.circuit, &self.initial, &self.schedule, &self.cfg)
    }
}

fn mv(chain: usize, from: usize, to: usize) -> Move {
    Move { chain, from, to }
}

fn step(index: usize, moves: Vec<Move>, started: Vec<usize>, finished: Vec<usize>) -> TimeStep {
    TimeStep {
        index,
        moves,
        cycles: vec![],
        gates_started: started,
        gates_finished: finished,
    }
}

/// The clean baseline followed by one case per rule, on the smallest grid.
pub fn fault_cases() -> Vec<FaultCase> {
    let graph = ArchGraph::build(GridSpec::new(2, 2, 1, 1)).unwrap();
    let k = graph.entry_node();
    let memory_at = |node: usize, not: usize| -> usize {
        *graph
            .incident(node)
            .iter()
            .find(|&&e| graph.is_memory(e) && e != not)
            .unwrap()
    };
    // m1, m2, m3 walk around the memory rectangle starting next to the entry junction
    let m1 = memory_at(k, usize::MAX);
    let y = graph.edges()[m1].other(k);
    let m2 = memory_at(y, m1);
    let z = graph.edges()[m2].other(y);
    let m3 = memory_at(z, m2);
    let (entry, proc_) = (graph.entry_edge(), graph.processing_edge());

    // RX then RY on one qubit: the two do not commute
    let mut two_gates = Circuit::new(1);
    two_gates.push(GateKind::Rx, &[0], Some(PI)).unwrap();
    two_gates.push(GateKind::Ry, &[0], Some(PI / 2.0)).unwrap();
    let sched = |steps: Vec<TimeStep>| Schedule {
        steps,
        summary: Summary::default(),
    };
    let into_pz = vec![mv(0, m1, entry), mv(0, entry, proc_)];
    let clean = sched(vec![
        step(0, into_pz.clone(), vec![0], vec![0]),
        step(1, vec![], vec![1], vec![1]),
    ]);
    let case = |rule: Option<Rule>, circuit: &Circuit, initial: Vec<usize>, schedule: Schedule| FaultCase {
        rule,
        graph: graph.clone(),
        circuit: circuit.clone(),
        initial: IonPlacement::new(&graph, initial).unwrap(),
        schedule,
        cfg: SchedulerConfig::default(),
    };
    let empty = Circuit::new(0);
    vec![
        case(None, &two_gates, vec![m1], clean.clone()),
        case(
            Some(Rule::Occupancy),
            &empty,
            vec![m1, m2],
            sched(vec![step(0, vec![mv(0, m1, m2)], vec![], vec![])]),
        ),
        case(
            Some(Rule::JunctionReuse),
            &empty,
            vec![m1],
            sched(vec![step(0, vec![mv(0, m1, m2), mv(0, m2, m3)], vec![], vec![])]),
        ),
        case(
            Some(Rule::NonAdjacentMove),
            &empty,
            vec![m1],
            sched(vec![step(0, vec![mv(0, m1, m3)], vec![], vec![])]),
        ),
        case(
            Some(Rule::GateOrder),
            &two_gates,
            vec![m1],
            sched(vec![
                step(0, into_pz.clone(), vec![1], vec![1]),
                step(1, vec![], vec![0], vec![0]),
            ]),
        ),
        case(
            Some(Rule::GateLocation),
            &two_gates,
            vec![m1],
            sched(vec![
                step(0, vec![mv(0, m1, entry)], vec![0], vec![0]),
                step(1, vec![mv(0, entry, proc_)], vec![1], vec![1]),
            ]),
        ),
        case(
            Some(Rule::Incomplete),
            &two_gates,
            vec![m1],
            sched(clean.steps[..1].to_vec()),
        ),
    ]
}
