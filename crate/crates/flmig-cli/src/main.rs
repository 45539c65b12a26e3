//! Experiment harness CLI.
//!
//! Subcommands: `run` (one algorithm, one dataset), `bench` (seeded
//! multi-run experiment with report/membership/trace files), `gen-gn`
//! (emit a planted-partition benchmark instance), `score` (modularity and
//! NMI of a stored membership file).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flmig::engine::RunConfig;
use flmig::error::Error;
use flmig::graph::{write_edge_list, Graph, NodeLabelMap};
use flmig::harness::{
    default_stall_limit, emit_outputs, load_edge_list_dataset, run_algorithm, run_experiment,
    write_report, write_trace, Algorithm, ExperimentSpec, OutputOptions, TimingMode,
};
use flmig::lfr::load_lfr;
use flmig::partition::{read_membership, write_membership, Partition};
use flmig::quality::{modularity, nmi, LabeledPartition, Resolution};
use flmig::synth::{generate_gn_seeded, GnSpec};

#[derive(Parser)]
#[command(name = "flmig", version, about = "Community detection by modularity maximization", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one dataset and print a summary.
    Run(RunArgs),
    /// Run a seeded multi-run experiment and write report files.
    Bench(BenchArgs),
    /// Generate a Girvan-Newman planted-partition instance.
    GenGn(GenGnArgs),
    /// Score a stored membership file against a graph.
    Score(ScoreArgs),
}

#[derive(Args)]
struct DatasetArgs {
    /// Edge-list file ("u v" or "u v w" lines, '#'/'%' comments).
    #[arg(long, value_name = "PATH")]
    graph: Option<PathBuf>,
    /// Parse the third column as edge weights.
    #[arg(long)]
    weighted: bool,
    /// Accept self-loops in the edge list.
    #[arg(long)]
    allow_self_loops: bool,
    /// LFR network file (1-based pairs, each edge listed both ways).
    #[arg(long, value_name = "PATH", requires = "lfr_community", conflicts_with = "graph")]
    lfr_network: Option<PathBuf>,
    /// LFR community file ("node community" lines).
    #[arg(long, value_name = "PATH", requires = "lfr_network")]
    lfr_community: Option<PathBuf>,
    /// Ground-truth membership file for NMI scoring.
    #[arg(long, value_name = "PATH")]
    ground_truth: Option<PathBuf>,
}

impl DatasetArgs {
    fn load(&self) -> Result<(Graph, NodeLabelMap, Option<LabeledPartition>, String), Error> {
        match (&self.graph, &self.lfr_network, &self.lfr_community) {
            (Some(graph_path), None, None) => {
                let (g, labels, truth) = load_edge_list_dataset(
                    graph_path,
                    self.weighted,
                    self.allow_self_loops,
                    self.ground_truth.as_deref(),
                )?;
                Ok((g, labels, truth, display_name(graph_path)))
            }
            (None, Some(network), Some(community)) => {
                let net = std::fs::File::open(network)?;
                let com = std::fs::File::open(community)?;
                let (g, labels, truth) =
                    load_lfr(std::io::BufReader::new(net), std::io::BufReader::new(com))?;
                Ok((g, labels, Some(truth), display_name(network)))
            }
            _ => Err(Error::InvalidConfig(
                "provide either --graph or an --lfr-network/--lfr-community pair".into(),
            )),
        }
    }
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Args)]
struct AlgorithmArgs {
    /// flmig, louvain, louvain-prune, or lpa.
    #[arg(long, default_value = "flmig")]
    algorithm: String,
    /// Destruction fraction in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Community-sampling randomness.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Modularity resolution.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Stall limit r; defaults to 100 / 50 / 10 by network size.
    #[arg(long, value_name = "R")]
    stall: Option<u32>,
    /// Hard cap on outer iterations.
    #[arg(long, value_name = "N")]
    max_iter: Option<u64>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl AlgorithmArgs {
    fn algorithm(&self) -> Result<Algorithm, Error> {
        self.algorithm.parse()
    }

    fn config(&self, node_count: usize) -> Result<RunConfig, Error> {
        let cfg = RunConfig {
            beta: self.beta,
            epsilon: self.epsilon,
            rho: Resolution::new(self.rho)?,
            stall_limit: self.stall.unwrap_or_else(|| default_stall_limit(node_count)),
            max_iterations: self.max_iter,
            seed: self.seed,
            ..RunConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    /// Write the best partition as a membership file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write the convergence trace as CSV.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Clock for file time columns: virtual (reproducible) or wall.
    #[arg(long, default_value = "virtual")]
    timing: String,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    /// Independent seeded runs.
    #[arg(long, default_value_t = 10)]
    runs: usize,
    /// Worker threads (1 = serial; results are identical either way).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Directory for summary.txt, memberships, and traces.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also write one trace CSV per run (requires --out).
    #[arg(long)]
    trace: bool,
    /// Clock for file time columns: virtual (reproducible) or wall.
    #[arg(long, default_value = "virtual")]
    timing: String,
}

#[derive(Args)]
struct GenGnArgs {
    /// Mixing parameter u in [0, 1].
    #[arg(long)]
    mixing: f64,
    #[arg(long, default_value_t = 4)]
    communities: usize,
    #[arg(long, default_value_t = 32)]
    community_size: usize,
    #[arg(long, default_value_t = 16.0)]
    degree: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-list output path.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Ground-truth membership output path.
    #[arg(long, value_name = "PATH")]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Edge-list file for the graph being scored.
    #[arg(long, value_name = "PATH")]
    graph: PathBuf,
    #[arg(long)]
    weighted: bool,
    #[arg(long)]
    allow_self_loops: bool,
    /// Membership file to score.
    #[arg(long, value_name = "PATH")]
    partition: PathBuf,
    /// Optional ground truth for NMI.
    #[arg(long, value_name = "PATH")]
    ground_truth: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidConfig(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Bench(args) => cmd_bench(args),
        Command::GenGn(args) => cmd_gen_gn(args),
        Command::Score(args) => cmd_score(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let timing: TimingMode = args.timing.parse()?;
    let (graph, labels, truth, name) = args.dataset.load()?;
    let algorithm = args.algorithm.algorithm()?;
    let cfg = args.algorithm.config(graph.node_count())?;

    let result = run_algorithm(algorithm, &graph, &cfg)?;

    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "dataset\t{name}")?;
    writeln!(stdout, "algorithm\t{algorithm}")?;
    writeln!(stdout, "seed\t{}", cfg.seed)?;
    writeln!(stdout, "q_best\t{:.6}", result.best_q)?;
    writeln!(stdout, "communities\t{}", result.best_partition.community_count())?;
    writeln!(stdout, "iterations\t{}", result.iterations)?;
    if let Some(truth) = &truth {
        let score = nmi(&LabeledPartition::from_partition(&result.best_partition), truth)?;
        writeln!(stdout, "nmi\t{score:.6}")?;
    }
    eprintln!("completed in {:.3}s", result.timings.total_seconds);

    if let Some(path) = &args.out {
        let mut file = std::fs::File::create(path)?;
        write_membership(&result.best_partition, &labels, &mut file)?;
    }
    if let Some(path) = &args.trace {
        let mut file = std::fs::File::create(path)?;
        write_trace(&result.trace, timing, &mut file)?;
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Error> {
    let timing: TimingMode = args.timing.parse()?;
    if args.trace && args.out.is_none() {
        return Err(Error::InvalidConfig("--trace requires --out DIR".into()));
    }
    let (graph, labels, truth, name) = args.dataset.load()?;
    let spec = ExperimentSpec {
        algorithm: args.algorithm.algorithm()?,
        config: args.algorithm.config(graph.node_count())?,
        runs: args.runs,
        threads: args.threads,
        dataset: name,
    };
    let started = std::time::Instant::now();
    let outcome = run_experiment(&graph, truth.as_ref(), &spec)?;

    let mut stdout = std::io::stdout().lock();
    write_report(&outcome.report, timing, &mut stdout)?;
    eprintln!("completed {} runs in {:.3}s", args.runs, started.elapsed().as_secs_f64());

    if let Some(directory) = args.out {
        let options = OutputOptions {
            directory,
            timing,
            write_traces: args.trace,
        };
        emit_outputs(&outcome, &labels, &options)?;
    }
    Ok(())
}

fn cmd_gen_gn(args: GenGnArgs) -> Result<(), Error> {
    let spec = GnSpec {
        node_count: args.communities * args.community_size,
        communities: args.communities,
        community_size: args.community_size,
        expected_degree: args.degree,
        mixing: args.mixing,
    };
    let (graph, truth) = generate_gn_seeded(&spec, args.seed)?;
    let labels = NodeLabelMap::numeric(graph.node_count());

    let mut file = std::fs::File::create(&args.out)?;
    write_edge_list(&graph, &labels, &mut file)?;
    if let Some(path) = &args.truth {
        let mut file = std::fs::File::create(path)?;
        for (v, &c) in truth.labels().iter().enumerate() {
            writeln!(file, "{v} {c}")?;
        }
    }
    eprintln!(
        "generated GN instance: {} nodes, {} edges",
        graph.node_count(),
        graph.edge_count()
    );
    Ok(())
}

fn cmd_score(args: ScoreArgs) -> Result<(), Error> {
    let (graph, labels, truth) = load_edge_list_dataset(
        &args.graph,
        args.weighted,
        args.allow_self_loops,
        args.ground_truth.as_deref(),
    )?;
    let file = std::fs::File::open(&args.partition)?;
    let membership = read_membership(std::io::BufReader::new(file), &labels)?;
    let partition = Partition::from_membership(&graph, &membership)?;
    let rho = Resolution::new(args.rho)?;

    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "q\t{:.6}", modularity(&graph, &partition, rho)?)?;
    writeln!(stdout, "communities\t{}", partition.community_count())?;
    if let Some(truth) = &truth {
        let score = nmi(&LabeledPartition::from_partition(&partition), truth)?;
        writeln!(stdout, "nmi\t{score:.6}")?;
    }
    Ok(())
}
