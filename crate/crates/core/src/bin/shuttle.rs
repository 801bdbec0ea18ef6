use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use qccd_shuttle::bench::{self, BenchCell, Family, DEFAULT_SEEDS, TABLE_ARCHITECTURES};
use qccd_shuttle::circuit::{builtin, compile, parse_circuit};
use qccd_shuttle::oracle::{optimal_schedule_length, random_placement, DEFAULT_BUDGET};
use qccd_shuttle::scheduler::{circuit_hash, run_schedule, ScheduleFile, SchedulerConfig};
use qccd_shuttle::verify::verify_schedule;
use qccd_shuttle::{ArchGraph, Circuit, Error, GridSpec, Result};

#[derive(Parser)]
#[command(
    name = "shuttle",
    version,
    about = "Shuttling schedules for grid-type QCCD trapped-ion devices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schedule a circuit on an architecture from a seeded random placement.
    Schedule(ScheduleArgs),
    /// Replay a schedule file and list rule violations.
    Verify(VerifyArgs),
    /// Exact minimum schedule length for full register access.
    Oracle(OracleArgs),
    /// Run benchmark cells and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON scheduler config; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    duration_1q: Option<u32>,
    #[arg(long)]
    duration_2q: Option<u32>,
    #[arg(long)]
    max_queue_len: Option<usize>,
    #[arg(long)]
    recompute_queue: bool,
    #[arg(long)]
    max_steps: Option<usize>,
}

impl ConfigArgs {
    fn load(&self) -> Result<SchedulerConfig> {
        let mut cfg = match &self.config {
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
            None => SchedulerConfig::default(),
        };
        if let Some(d) = self.duration_1q {
            cfg.duration_1q = d;
        }
        if let Some(d) = self.duration_2q {
            cfg.duration_2q = d;
        }
        if self.max_queue_len.is_some() {
            cfg.max_queue_len = self.max_queue_len;
        }
        if self.recompute_queue {
            cfg.recompute_queue_each_step = true;
        }
        if self.max_steps.is_some() {
            cfg.max_steps_guard = self.max_steps;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct ScheduleArgs {
    /// Architecture: a JSON grid spec file or `m,n,v,h`.
    #[arg(long)]
    arch: String,
    /// OpenQASM file or `builtin:<fra|ghz|graph|qft>:N`.
    #[arg(long)]
    circuit: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of memory edges holding a chain.
    #[arg(long, default_value_t = 0.5)]
    occupancy: f64,
    /// Schedule JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Schedule JSON written by `schedule` or `oracle --witness`.
    schedule: PathBuf,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    arch: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    occupancy: f64,
    /// Distinct states explored before giving up.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Oracle result JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Witness schedule output, readable by `verify`.
    #[arg(long)]
    witness: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON list of grid specs; the twenty evaluation layouts when omitted.
    #[arg(long)]
    archs: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "fra,ghz,graph,qft")]
    families: Vec<Family>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Also compute exact minima for full register access.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

fn load_arch(arg: &str) -> Result<GridSpec> {
    let spec = if Path::new(arg).exists() {
        serde_json::from_str(&std::fs::read_to_string(arg)?)?
    } else {
        let dims: Vec<usize> = arg
            .split(',')
            .map(|x| x.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Validation {
                field: "arch",
                reason: format!("'{arg}' is neither a file nor 'm,n,v,h'"),
            })?;
        match dims[..] {
            [m, n, v, h] => GridSpec::new(m, n, v, h),
            _ => {
                return Err(Error::Validation {
                    field: "arch",
                    reason: format!("expected four numbers, got '{arg}'"),
                })
            }
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// Builtin or OpenQASM circuit, rewritten into the native gate set if needed.
fn load_circuit(arg: &str) -> Result<Circuit> {
    let raw: Circuit = match arg.strip_prefix("builtin:") {
        Some(name) => builtin(name)?,
        None => parse_circuit(&std::fs::read_to_string(arg)?)?,
    };
    if raw.is_native() {
        Ok(raw)
    } else {
        Ok(compile(&raw)?.circuit)
    }
}

fn chain_count(spec: &GridSpec, occupancy: f64, qubits: usize) -> Result<usize> {
    let chains = bench::chains_for(spec, occupancy)?;
    if chains < qubits {
        return Err(Error::Validation {
            field: "occupancy",
            reason: format!("{chains} chains cannot hold {qubits} qubits"),
        });
    }
    Ok(chains)
}

fn cmd_schedule(a: &ScheduleArgs) -> Result<ExitCode> {
    let spec = load_arch(&a.arch)?;
    let cfg = a.config.load()?;
    let circuit = load_circuit(&a.circuit)?;
    let graph = ArchGraph::build(spec)?;
    let chains = chain_count(&spec, a.occupancy, circuit.qubit_count())?;
    let placement = random_placement(&graph, chains, a.seed)?;
    let clock = Instant::now();
    let schedule = run_schedule(&graph, &circuit, &placement, &cfg)?;
    let t_cpu = clock.elapsed().as_secs_f64();
    println!(
        "T_hat={} G={} t_cpu={t_cpu:.6}",
        schedule.summary.t_hat, schedule.summary.gates
    );
    if let Some(out) = &a.out {
        ScheduleFile::new(spec, &circuit, Some(a.seed), cfg, placement, schedule).write(out)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: &VerifyArgs) -> Result<ExitCode> {
    let file = ScheduleFile::read(&a.schedule)?;
    let h = &file.header;
    let graph = ArchGraph::build(h.architecture)?;
    let circuit: Circuit = parse_circuit(&h.circuit)?;
    if circuit_hash(&circuit) != h.circuit_hash {
        return Err(Error::Validation {
            field: "circuit_hash",
            reason: "header hash does not match the embedded circuit".into(),
        });
    }
    let initial = h.initial_placement.clone().attach(&graph)?;
    let report = verify_schedule(&graph, &circuit, &initial, &file.schedule(), &h.config);
    if a.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
        println!("{} violation(s)", report.len());
    }
    Ok(if report.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_oracle(a: &OracleArgs) -> Result<ExitCode> {
    let spec = load_arch(&a.arch)?;
    let cfg = a.config.load()?;
    let graph = ArchGraph::build(spec)?;
    let chains = chain_count(&spec, a.occupancy, 0)?;
    let placement = random_placement(&graph, chains, a.seed)?;
    let clock = Instant::now();
    let result = optimal_schedule_length(&graph, &placement, chains, &cfg, a.budget)?;
    println!(
        "T_min={} states={} t_cpu={:.6}",
        result.t_min,
        result.states_explored,
        clock.elapsed().as_secs_f64()
    );
    if let Some(out) = &a.out {
        let mut text = serde_json::to_string_pretty(&result)?;
        text.push('\n');
        std::fs::write(out, text)?;
    }
    if let Some(path) = &a.witness {
        let circuit: Circuit = bench::Family::Fra.circuit(chains)?;
        ScheduleFile::new(spec, &circuit, Some(a.seed), cfg, placement, result.witness).write(path)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(a: &BenchArgs) -> Result<ExitCode> {
    let cfg = a.config.load()?;
    let specs: Vec<GridSpec> = match &a.archs {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => TABLE_ARCHITECTURES
            .iter()
            .map(|&(m, n, v, h)| GridSpec::new(m, n, v, h))
            .collect(),
    };
    let seeds = a.seeds.clone().unwrap_or_else(|| DEFAULT_SEEDS.to_vec());
    let seeds = &seeds;
    let cells: Vec<BenchCell> = specs
        .iter()
        .flat_map(|&spec| {
            a.families.iter().map(move |&family| BenchCell {
                spec,
                family,
                seeds: seeds.clone(),
            })
        })
        .collect();
    let results = bench::run_bench(&cells, &cfg, a.oracle.then_some(a.budget), a.jobs)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let csv = bench::to_csv(&results)?;
    match &a.out {
        Some(p) => std::fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Schedule(_) | Error::Json(_) | Error::Io(_) => 2,
        Error::Livelock { .. } => 4,
        Error::Saturation(_) => 5,
        Error::Budget { .. } => 6,
        _ => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("SHUTTLE_LOG")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Schedule(a) => cmd_schedule(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => cmd_bench(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(exit_code(&e))
    })
}
