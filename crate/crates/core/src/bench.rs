//! Seeded benchmark cells over architectures and circuit families, with CSV output.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arch::{ArchGraph, GridSpec};
use crate::circuit::{compile, fra, ghz, graph_state, qft, Circuit};
use crate::error::{Error, Result};
use crate::oracle::{optimal_schedule_length, random_placement};
use crate::scheduler::{run_schedule, SchedulerConfig};

/// The twenty evaluation layouts, grouped racetrack, vertical grate, horizontal grate, lattice.
pub const TABLE_ARCHITECTURES: [(usize, usize, usize, usize); 20] = [
    (2, 2, 1, 5),
    (2, 2, 1, 11),
    (2, 2, 1, 19),
    (2, 2, 1, 29),
    (2, 2, 1, 39),
    (2, 4, 1, 1),
    (2, 6, 1, 1),
    (2, 8, 1, 1),
    (2, 10, 1, 1),
    (2, 10, 5, 5),
    (4, 2, 1, 1),
    (6, 2, 1, 1),
    (8, 2, 1, 1),
    (10, 2, 1, 1),
    (10, 2, 5, 5),
    (3, 3, 1, 1),
    (4, 4, 1, 1),
    (5, 5, 1, 1),
    (6, 6, 1, 1),
    (10, 10, 1, 1),
];

pub const DEFAULT_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Fra,
    Ghz,
    Graph,
    Qft,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Fra, Family::Ghz, Family::Graph, Family::Qft];

    pub fn name(self) -> &'static str {
        match self {
            Family::Fra => "fra",
            Family::Ghz => "ghz",
            Family::Graph => "graph",
            Family::Qft => "qft",
        }
    }

    /// Native circuit on `qubits` qubits.
    pub fn circuit(self, qubits: usize) -> Result<Circuit<f64>> {
        let raw = match self {
            Family::Fra => return Ok(fra(qubits)),
            Family::Ghz => ghz(qubits),
            Family::Graph => graph_state(qubits),
            Family::Qft => qft(qubits),
        };
        Ok(compile(&raw)?.circuit)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::validation("family", format!("unknown circuit family '{s}'")))
    }
}

/// Chains placed for a given occupancy fraction of the memory edges.
pub fn chains_for(spec: &GridSpec, occupancy: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&occupancy) {
        return Err(Error::validation("occupancy", format!("{occupancy} is not in [0, 1]")));
    }
    Ok((occupancy * spec.memory_edge_count() as f64).floor() as usize)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub spec: GridSpec,
    pub family: Family,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub family_type: String,
    pub spec: GridSpec,
    pub chains: usize,
    pub memory_edges: usize,
    pub circuit: Family,
    pub seeds: Vec<u64>,
    pub t_hat: Vec<usize>,
    pub mean_t_hat: f64,
    pub gates: usize,
    /// Wall-clock seconds of each scheduling run.
    pub t_cpu: Vec<f64>,
    pub t_min: Option<Vec<usize>>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

impl BenchResult {
    pub fn mean_t_cpu(&self) -> f64 {
        mean(self.t_cpu.iter().copied())
    }

    pub fn mean_t_min(&self) -> Option<f64> {
        self.t_min.as_ref().map(|t| mean(t.iter().map(|&x| x as f64)))
    }

    /// Mean over seeds of `T_hat / T_min`.
    pub fn mean_ratio(&self) -> Option<f64> {
        let t_min = self.t_min.as_ref()?;
        Some(mean(self.t_hat.iter().zip(t_min).map(|(&a, &b)| {
            if b == 0 {
                1.0
            } else {
                a as f64 / b as f64
            }
        })))
    }
}

/// Runs one cell at half occupancy. The oracle only applies to full register access.
pub fn run_cell(cell: &BenchCell, cfg: &SchedulerConfig, oracle_budget: Option<usize>) -> Result<BenchResult> {
    let graph = ArchGraph::build(cell.spec)?;
    let chains = chains_for(&cell.spec, 0.5)?;
    let circuit = cell.family.circuit(chains)?;
    let mut t_hat = Vec::new();
    let mut t_cpu = Vec::new();
    let mut t_min = (oracle_budget.is_some() && cell.family == Family::Fra).then(Vec::new);
    for &seed in &cell.seeds {
        let placement = random_placement(&graph, chains, seed)?;
        let clock = Instant::now();
        let schedule = run_schedule(&graph, &circuit, &placement, cfg)?;
        t_cpu.push(clock.elapsed().as_secs_f64());
        t_hat.push(schedule.summary.t_hat);
        if let (Some(out), Some(budget)) = (t_min.as_mut(), oracle_budget) {
            match optimal_schedule_length(&graph, &placement, chains, cfg, budget) {
                Ok(r) => out.push(r.t_min),
                // out of reach for the exact search: leave the cell without T_min
                Err(e @ (Error::Budget { .. } | Error::Unsupported(_))) => {
                    log::warn!("{} seed {seed}: no T_min ({e})", cell.spec.label());
                    t_min = None;
                }
                Err(e) => return Err(e),
            }
        }
        log::info!(
            "{} {} seed {seed}: T_hat={}",
            cell.spec.label(),
            cell.family,
            schedule.summary.t_hat
        );
    }
    Ok(BenchResult {
        family_type: cell.spec.family().to_string(),
        spec: cell.spec,
        chains,
        memory_edges: cell.spec.memory_edge_count(),
        circuit: cell.family,
        seeds: cell.seeds.clone(),
        mean_t_hat: mean(t_hat.iter().map(|&x| x as f64)),
        t_hat,
        gates: circuit.len(),
        t_cpu,
        t_min,
    })
}

/// Runs every cell on `jobs` worker threads; results come back in cell order.
pub fn run_bench(
    cells: &[BenchCell],
    cfg: &SchedulerConfig,
    oracle_budget: Option<usize>,
    jobs: usize,
) -> Vec<Result<BenchResult>> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<BenchResult>>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, cells.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let r = run_cell(&cells[i], cfg, oracle_budget);
                slots.lock().expect("no worker panicked")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

pub const CSV_HEADER: [&str; 15] = [
    "type",
    "m",
    "n",
    "v",
    "h",
    "occupancy",
    "circuit",
    "seeds",
    "G",
    "T_hat_per_seed",
    "T_hat",
    "t_cpu",
    "T_min_per_seed",
    "T_min",
    "ratio",
];

/// CSV with one row per result; list-valued columns are `;`-separated.
pub fn to_csv(results: &[BenchResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in results {
        let opt = |x: Option<String>| x.unwrap_or_default();
        w.write_record([
            r.family_type.clone(),
            r.spec.m.to_string(),
            r.spec.n.to_string(),
            r.spec.v.to_string(),
            r.spec.h.to_string(),
            format!("{}/{}", r.chains, r.memory_edges),
            r.circuit.to_string(),
            join(&r.seeds),
            r.gates.to_string(),
            join(&r.t_hat),
            format!("{:.1}", r.mean_t_hat),
            format!("{:.4}", r.mean_t_cpu()),
            opt(r.t_min.as_deref().map(join)),
            opt(r.mean_t_min().map(|x| format!("{x:.1}"))),
            opt(r.mean_ratio().map(|x| format!("{x:.3}"))),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_layouts_group_by_family() {
        let fams: Vec<&str> = TABLE_ARCHITECTURES
            .iter()
            .map(|&(m, n, v, h)| GridSpec::new(m, n, v, h).family())
            .collect();
        for (k, name) in ["racetrack", "vertical-grate", "horizontal-grate", "lattice"]
            .iter()
            .enumerate()
        {
            assert!(fams[5 * k..5 * k + 5].iter().all(|f| f == name));
        }
    }

    #[test]
    fn occupancy_rounds_down() {
        let s = GridSpec::new(2, 4, 1, 1);
        assert_eq!(chains_for(&s, 0.5).unwrap(), 5);
        assert_eq!(chains_for(&s, 1.0).unwrap(), 10);
        assert!(chains_for(&s, 1.5).is_err());
    }

    #[test]
    fn oracle_out_of_budget_leaves_t_min_empty() {
        let cell = BenchCell {
            spec: GridSpec::new(4, 4, 1, 1),
            family: Family::Fra,
            seeds: vec![0, 1],
        };
        let r = run_cell(&cell, &SchedulerConfig::default(), Some(1000)).unwrap();
        assert_eq!(r.t_hat.len(), 2);
        assert!(r.t_min.is_none());
        let small = BenchCell {
            spec: GridSpec::new(2, 2, 1, 1),
            ..cell
        };
        let r = run_cell(&small, &SchedulerConfig::default(), Some(1000)).unwrap();
        assert_eq!(r.t_min.map(|t| t.len()), Some(2));
    }

    #[test]
    fn cells_are_reproducible() {
        let cell = BenchCell {
            spec: GridSpec::new(3, 3, 1, 1),
            family: Family::Ghz,
            seeds: vec![3, 4],
        };
        let cfg = SchedulerConfig::default();
        let a = run_cell(&cell, &cfg, None).unwrap();
        let b = run_cell(&cell, &cfg, None).unwrap();
        assert_eq!((a.t_hat, a.gates), (b.t_hat, b.gates));
        assert!(a.t_cpu.iter().all(|&t| t > 0.0));
    }

    #[test]
    fn csv_has_one_row_per_cell() {
        let cells: Vec<BenchCell> = [Family::Fra, Family::Qft]
            .into_iter()
            .map(|family| BenchCell {
                spec: GridSpec::new(2, 4, 1, 1),
                family,
                seeds: vec![0],
            })
            .collect();
        let results: Vec<BenchResult> = run_bench(&cells, &SchedulerConfig::default(), Some(1_000_000), 2)
            .into_iter()
            .collect::<Result<_>>()
            .unwrap();
        assert!(results[0].t_min.is_some() && results[1].t_min.is_none());
        let text = to_csv(&results).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("vertical-grate,2,4,1,1,5/10,fra,0,5,"));
    }
}
