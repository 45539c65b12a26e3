//! Multi-run experiment harness: deterministic per-run seed derivation,
//! optional worker-thread fan-out, and line-oriented report / trace /
//! membership writers.
//!
//! Output files are byte-identical across invocations and thread counts for
//! a given master seed. Timing columns default to the deterministic virtual
//! clock (gain evaluations at 10ns each); wall-clock values are opt-in via
//! [`TimingMode::Wall`] and are the one output that is not reproducible.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::baselines::{run_baseline, BaselineChoice};
use crate::engine::{run_flmig, RunConfig, RunResult, TraceRecord, VIRTUAL_SECONDS_PER_GAIN_EVALUATION};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeLabelMap};
use crate::partition::write_membership;
use crate::quality::{nmi, LabeledPartition};

/// Algorithm selector for the harness and CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Flmig,
    Baseline(BaselineChoice),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Flmig => "flmig",
            Algorithm::Baseline(BaselineChoice::Louvain) => "louvain",
            Algorithm::Baseline(BaselineChoice::LouvainPrune) => "louvain-prune",
            Algorithm::Baseline(BaselineChoice::Lpa) => "lpa",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algorithm> {
        match s {
            "flmig" => Ok(Algorithm::Flmig),
            "louvain" => Ok(Algorithm::Baseline(BaselineChoice::Louvain)),
            "louvain-prune" => Ok(Algorithm::Baseline(BaselineChoice::LouvainPrune)),
            "lpa" => Ok(Algorithm::Baseline(BaselineChoice::Lpa)),
            other => Err(Error::InvalidConfig(format!(
                "unknown algorithm '{other}' (expected flmig, louvain, louvain-prune, or lpa)"
            ))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn run_algorithm(algorithm: Algorithm, g: &Graph, cfg: &RunConfig) -> Result<RunResult> {
    match algorithm {
        Algorithm::Flmig => run_flmig(g, cfg),
        Algorithm::Baseline(choice) => run_baseline(choice, g, cfg),
    }
}

/// SplitMix64 step; run `i` of a master seed gets an independent,
/// platform-stable seed.
pub fn derive_seed(master: u64, run_index: u64) -> u64 {
    let mut z = master
        .wrapping_add(run_index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One experiment: a dataset, an algorithm, and `runs` seeded repetitions.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    /// Per-run template; its `seed` field is the master seed.
    pub config: RunConfig,
    pub runs: usize,
    pub threads: usize,
    pub dataset: String,
}

/// Per-run summary row.
#[derive(Debug, Clone, Copy)]
pub struct RunRow {
    pub run_index: usize,
    pub seed: u64,
    pub q_best: f64,
    pub nmi: Option<f64>,
    pub iterations: u64,
    pub communities: usize,
    pub gain_evaluations: u64,
    /// Wall-clock seconds for this run; reported but never written to files
    /// unless wall timing is requested.
    pub wall_seconds: f64,
}

impl RunRow {
    /// Deterministic per-run time under the virtual clock.
    pub fn virtual_seconds(&self) -> f64 {
        self.gain_evaluations as f64 * VIRTUAL_SECONDS_PER_GAIN_EVALUATION
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregates {
    pub q_best: f64,
    pub q_mean: f64,
    pub q_std: f64,
    pub nmi_best: Option<f64>,
}

/// Recomputes aggregates from rows; the stored copy must always match.
pub fn aggregate(rows: &[RunRow]) -> Aggregates {
    let n = rows.len() as f64;
    let q_best = rows.iter().map(|r| r.q_best).fold(f64::NEG_INFINITY, f64::max);
    let q_mean = rows.iter().map(|r| r.q_best).sum::<f64>() / n;
    let variance = rows.iter().map(|r| (r.q_best - q_mean).powi(2)).sum::<f64>() / n;
    let nmi_best = rows
        .iter()
        .filter_map(|r| r.nmi)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
    Aggregates {
        q_best,
        q_mean,
        q_std: variance.sqrt(),
        nmi_best,
    }
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub master_seed: u64,
    pub config: RunConfig,
    pub threads: usize,
    pub rows: Vec<RunRow>,
    pub aggregates: Aggregates,
}

/// Report plus the full per-run results (partitions and traces) for output
/// emission.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub results: Vec<RunResult>,
}

/// Runs the experiment. Run `i` uses `derive_seed(master, i)`, so results
/// are independent of scheduling; with `threads > 1` runs execute
/// concurrently over the shared graph and are reassembled in run order.
pub fn run_experiment(
    g: &Graph,
    truth: Option<&LabeledPartition>,
    spec: &ExperimentSpec,
) -> Result<ExperimentOutcome> {
    if spec.runs == 0 {
        return Err(Error::InvalidConfig("need at least one run".into()));
    }
    if spec.threads == 0 {
        return Err(Error::InvalidConfig("need at least one thread".into()));
    }

    let one_run = |index: usize| -> Result<(RunRow, RunResult)> {
        let mut cfg = spec.config;
        cfg.seed = derive_seed(spec.config.seed, index as u64);
        let started = Instant::now();
        let result = run_algorithm(spec.algorithm, g, &cfg)?;
        let wall_seconds = started.elapsed().as_secs_f64();
        let score = match truth {
            Some(t) => Some(nmi(&LabeledPartition::from_partition(&result.best_partition), t)?),
            None => None,
        };
        let row = RunRow {
            run_index: index,
            seed: cfg.seed,
            q_best: result.best_q,
            nmi: score,
            iterations: result.iterations,
            communities: result.best_partition.community_count(),
            gain_evaluations: result.gain_evaluations,
            wall_seconds,
        };
        Ok((row, result))
    };

    let mut outputs: Vec<Option<(RunRow, RunResult)>> = Vec::new();
    outputs.resize_with(spec.runs, || None);

    if spec.threads == 1 {
        for (index, slot) in outputs.iter_mut().enumerate() {
            *slot = Some(one_run(index)?);
        }
    } else {
        let next = AtomicUsize::new(0);
        let slots = Mutex::new(&mut outputs);
        let first_error: Mutex<Option<Error>> = Mutex::new(None);
        std::thread::scope(|scope| {
            for _ in 0..spec.threads.min(spec.runs) {
                scope.spawn(|| loop {
                    let index = next.fetch_add(1, Ordering::SeqCst);
                    if index >= spec.runs {
                        break;
                    }
                    match one_run(index) {
                        Ok(done) => {
                            slots.lock().unwrap()[index] = Some(done);
                        }
                        Err(e) => {
                            let mut guard = first_error.lock().unwrap();
                            if guard.is_none() {
                                *guard = Some(e);
                            }
                            break;
                        }
                    }
                });
            }
        });
        if let Some(e) = first_error.into_inner().unwrap() {
            return Err(e);
        }
    }

    let mut rows = Vec::with_capacity(spec.runs);
    let mut results = Vec::with_capacity(spec.runs);
    for slot in outputs {
        let (row, result) = slot.expect("every run index is filled");
        rows.push(row);
        results.push(result);
    }
    let aggregates = aggregate(&rows);
    Ok(ExperimentOutcome {
        report: ExperimentReport {
            dataset: spec.dataset.clone(),
            algorithm: spec.algorithm,
            master_seed: spec.config.seed,
            config: spec.config,
            threads: spec.threads,
            rows,
            aggregates,
        },
        results,
    })
}

/// Which clock feeds the time columns of report and trace files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingMode {
    /// Deterministic proxy time derived from gain-evaluation counts.
    Virtual,
    /// Real wall-clock measurements; not reproducible across invocations.
    Wall,
}

impl FromStr for TimingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<TimingMode> {
        match s {
            "virtual" => Ok(TimingMode::Virtual),
            "wall" => Ok(TimingMode::Wall),
            other => Err(Error::InvalidConfig(format!(
                "unknown timing mode '{other}' (expected virtual or wall)"
            ))),
        }
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.6}"),
        None => "-".to_string(),
    }
}

/// Versioned line-oriented run summary.
pub fn write_report<W: Write>(report: &ExperimentReport, timing: TimingMode, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# flmig-bench v1")?;
    writeln!(out, "dataset\t{}", report.dataset)?;
    writeln!(out, "algorithm\t{}", report.algorithm)?;
    writeln!(out, "master_seed\t{}", report.master_seed)?;
    writeln!(out, "runs\t{}", report.rows.len())?;
    writeln!(out, "beta\t{}", report.config.beta)?;
    writeln!(out, "epsilon\t{}", report.config.epsilon)?;
    writeln!(out, "rho\t{}", report.config.rho.get())?;
    writeln!(out, "stall_limit\t{}", report.config.stall_limit)?;
    match report.config.max_iterations {
        Some(cap) => writeln!(out, "max_iterations\t{cap}")?,
        None => writeln!(out, "max_iterations\t-")?,
    }
    writeln!(
        out,
        "timing\t{}",
        match timing {
            TimingMode::Virtual => "virtual",
            TimingMode::Wall => "wall",
        }
    )?;
    writeln!(out, "run\tseed\tq_best\tnmi\titerations\tcommunities\ttime_s")?;
    for row in &report.rows {
        let time = match timing {
            TimingMode::Virtual => row.virtual_seconds(),
            TimingMode::Wall => row.wall_seconds,
        };
        writeln!(
            out,
            "{}\t{}\t{:.6}\t{}\t{}\t{}\t{:.6}",
            row.run_index,
            row.seed,
            row.q_best,
            fmt_opt(row.nmi),
            row.iterations,
            row.communities,
            time
        )?;
    }
    writeln!(out, "aggregate\tq_best\t{:.6}", report.aggregates.q_best)?;
    writeln!(out, "aggregate\tq_mean\t{:.6}", report.aggregates.q_mean)?;
    writeln!(out, "aggregate\tq_std\t{:.6}", report.aggregates.q_std)?;
    writeln!(out, "aggregate\tnmi_best\t{}", fmt_opt(report.aggregates.nmi_best))?;
    Ok(())
}

/// Plot-ready convergence trace.
pub fn write_trace<W: Write>(trace: &[TraceRecord], timing: TimingMode, mut out: W) -> std::io::Result<()> {
    writeln!(out, "iteration,elapsed_s,Q_current,Q_best,temperature")?;
    for record in trace {
        let elapsed = match timing {
            TimingMode::Virtual => record.virtual_seconds,
            TimingMode::Wall => record.elapsed_seconds,
        };
        writeln!(
            out,
            "{},{:.9},{:.6},{:.6},{:.9}",
            record.iteration, elapsed, record.q_current, record.q_best, record.temperature
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct OutputOptions {
    pub directory: PathBuf,
    pub timing: TimingMode,
    pub write_traces: bool,
}

/// Writes `summary.txt`, one membership file per run, and (optionally) one
/// trace CSV per run into the output directory. Returns the written paths.
pub fn emit_outputs(
    outcome: &ExperimentOutcome,
    labels: &NodeLabelMap,
    options: &OutputOptions,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&options.directory)?;
    let mut written = Vec::new();

    let summary = options.directory.join("summary.txt");
    let mut file = std::fs::File::create(&summary)?;
    write_report(&outcome.report, options.timing, &mut file)?;
    written.push(summary);

    for (index, result) in outcome.results.iter().enumerate() {
        let membership = options.directory.join(format!("run_{index:03}.membership.txt"));
        let mut file = std::fs::File::create(&membership)?;
        write_membership(&result.best_partition, labels, &mut file)?;
        written.push(membership);

        if options.write_traces {
            let trace = options.directory.join(format!("run_{index:03}.trace.csv"));
            let mut file = std::fs::File::create(&trace)?;
            write_trace(&result.trace, options.timing, &mut file)?;
            written.push(trace);
        }
    }
    Ok(written)
}

/// Stall-limit default keyed by network size: generous patience on small
/// networks, less on large ones where iterations are expensive.
pub fn default_stall_limit(node_count: usize) -> u32 {
    if node_count < 2_000 {
        100
    } else if node_count < 100_000 {
        50
    } else {
        10
    }
}

/// Loads an edge-list dataset together with an optional ground-truth
/// membership file.
pub fn load_edge_list_dataset(
    graph_path: &Path,
    weighted: bool,
    allow_self_loops: bool,
    truth_path: Option<&Path>,
) -> Result<(Graph, NodeLabelMap, Option<LabeledPartition>)> {
    let file = std::fs::File::open(graph_path)?;
    let (graph, labels) = crate::graph::parse_edge_list(
        std::io::BufReader::new(file),
        crate::graph::ParseOptions {
            weighted,
            allow_self_loops,
        },
    )?;
    let truth = match truth_path {
        Some(path) => {
            let file = std::fs::File::open(path)?;
            let membership = crate::partition::read_membership(std::io::BufReader::new(file), &labels)?;
            Some(LabeledPartition::new(membership)?)
        }
        None => None,
    };
    Ok((graph, labels, truth))
}
