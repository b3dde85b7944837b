use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use awake_mis::engine::{Graph, RunConfig};
use awake_mis::graphs::{assign_random_ids, components, default_id_bound};
use awake_mis::harness::{
    check_mis, residual_sparsity_experiment, run_algorithm, scaling_runs, shattering_experiment, summarize,
    write_csv, Algorithm, GraphKind, GraphSpec, HarnessError,
};
use awake_mis::ldt::{check_ldt, ldt_construct_round};
use awake_mis::mis::{AwakeMisParams, MisState};
use awake_mis::vtree::CommTree;

#[derive(Parser)]
#[command(name = "awake-mis", version, about = "Sleeping-model MIS simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an MIS algorithm for several seeds and report one metrics row per run.
    Run(RunArgs),
    /// Check a states JSON file against a graph.
    Verify {
        #[arg(long)]
        states: PathBuf,
        /// Edge-list file.
        #[arg(long)]
        graph: PathBuf,
    },
    /// Statistical experiments and scaling studies.
    Experiment(ExperimentArgs),
    /// Generate a graph and write it as an edge list.
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspection helpers.
    #[command(subcommand)]
    Debug(DebugCommand),
}

#[derive(Subcommand)]
enum DebugCommand {
    /// Communication sets of every ID in [1, i].
    SkTable {
        #[arg(long)]
        i: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Build an LDT on the largest component and dump the per-node states as JSON.
    LdtDump {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Awake-MIS parameters for a given N.
    Params {
        #[arg(long)]
        n: u64,
    },
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Graph family: gnp, sparse, log-density, path, cycle, star, complete, tree.
    #[arg(long, default_value = "sparse")]
    graph: String,
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Edge probability for the gnp family.
    #[arg(long)]
    p: Option<f64>,
    /// Read the graph from an edge-list file instead.
    #[arg(long)]
    edges: Option<PathBuf>,
}

impl GraphArgs {
    fn spec(&self) -> Result<GraphSpec, HarnessError> {
        Ok(GraphSpec::new(self.graph.parse()?, self.n, self.p))
    }

    fn load(&self, seed: u64) -> Result<(Graph, String), HarnessError> {
        match &self.edges {
            Some(path) => Ok((read_graph(path)?, path.display().to_string())),
            None => {
                let spec = self.spec()?;
                Ok((spec.build(seed)?, spec.descriptor()))
            }
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// vt, ldt-mis, awake-mis or luby.
    #[arg(long, default_value = "awake-mis")]
    algo: String,
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the per-node states of the first trial as JSON.
    #[arg(long)]
    states_out: Option<PathBuf>,
    /// Write the execution trace of the first trial as JSON.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExperimentName {
    Sparsity,
    Shattering,
    Scaling,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    name: ExperimentName,
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 128)]
    t: usize,
    #[arg(long, default_value_t = 512)]
    t_prime: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Required pass rate for the sparsity and shattering experiments.
    #[arg(long, default_value_t = 0.9)]
    min_pass: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Algorithm for the scaling study.
    #[arg(long, default_value = "awake-mis")]
    algo: String,
    /// Comma-separated ascending sizes for the scaling study.
    #[arg(long, value_delimiter = ',', default_value = "256,1024,4096")]
    sizes: Vec<usize>,
    /// Seeds per size for the scaling study.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Per-run rows instead of per-size aggregates.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn read_graph(path: &Path) -> Result<Graph, HarnessError> {
    Ok(fs::read_to_string(path)?.parse::<Graph>()?)
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match out {
        Some(path) => Box::new(fs::File::create(path)?),
        None => Box::new(io::stdout()),
    })
}

fn emit<T: Serialize>(out: &Option<PathBuf>, format: Format, rows: &[T]) -> Result<(), HarnessError> {
    let mut w = sink(out)?;
    match format {
        Format::Csv => write_csv(w, rows),
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
            Ok(())
        }
    }
}

fn run(args: RunArgs) -> Result<bool, HarnessError> {
    let algo: Algorithm = args.algo.parse()?;
    let mut rows = Vec::new();
    for trial in 0..args.trials {
        let seed = args.seed + trial;
        let (graph, descriptor) = args.graph.load(seed)?;
        let outcome = run_algorithm(algo, &graph, &descriptor, seed)?;
        if trial == 0 {
            if let Some(path) = &args.states_out {
                fs::write(path, serde_json::to_string(&outcome.states)?)?;
            }
            if let Some(path) = &args.trace_out {
                fs::write(path, outcome.trace.to_json())?;
            }
        }
        rows.push(outcome.metrics);
    }
    emit(&args.out, args.format, &rows)?;
    Ok(rows.iter().all(|r| r.valid && r.budget_violations == 0 && r.cap_hits == 0))
}

fn verify(states: &Path, graph: &Path) -> Result<bool, HarnessError> {
    let graph = read_graph(graph)?;
    let states: Vec<MisState> = serde_json::from_str(&fs::read_to_string(states)?)?;
    if states.len() != graph.node_count() {
        return Err(HarnessError::Params(format!(
            "{} states for {} nodes",
            states.len(),
            graph.node_count()
        )));
    }
    let report = check_mis(&graph, &states);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.valid)
}

fn experiment(args: ExperimentArgs) -> Result<bool, HarnessError> {
    match args.name {
        ExperimentName::Sparsity => {
            let spec = args.graph.spec()?;
            let r = residual_sparsity_experiment(&spec, args.t, args.t_prime, args.eps, args.trials, args.seed)?;
            let ok = r.pass_rate >= args.min_pass;
            emit(&args.out, args.format, &[r])?;
            Ok(ok)
        }
        ExperimentName::Shattering => {
            let (graph, descriptor) = args.graph.load(args.seed)?;
            let r = shattering_experiment(&graph, &descriptor, args.eps, args.trials, args.seed)?;
            let ok = r.pass_rate >= args.min_pass;
            emit(&args.out, args.format, &[r])?;
            Ok(ok)
        }
        ExperimentName::Scaling => {
            let algo: Algorithm = args.algo.parse()?;
            let kind: GraphKind = args.graph.graph.parse()?;
            let seeds: Vec<u64> = (args.seed..args.seed + args.seeds).collect();
            let runs = scaling_runs(algo, kind, args.graph.p, &args.sizes, &seeds)?;
            let ok = runs.iter().all(|r| r.valid && r.budget_violations == 0 && r.cap_hits == 0);
            if args.raw {
                emit(&args.out, args.format, &runs)?;
            } else {
                emit(&args.out, args.format, &summarize(&runs))?;
            }
            Ok(ok)
        }
    }
}

#[derive(Serialize)]
struct SkRow {
    k: u64,
    set: String,
}

#[derive(Serialize)]
struct LdtDump<'a> {
    graph: String,
    nodes: Vec<usize>,
    ids: &'a [awake_mis::graphs::NodeId],
    valid: bool,
    violation: Option<String>,
    max_awake: usize,
    total_rounds: u64,
    states: Vec<Option<awake_mis::ldt::LdtState>>,
}

fn debug(cmd: DebugCommand) -> Result<bool, HarnessError> {
    match cmd {
        DebugCommand::SkTable { i, format } => {
            let tree = CommTree::new(i).map_err(|e| HarnessError::Params(e.to_string()))?;
            let rows: Vec<SkRow> = tree
                .table()
                .into_iter()
                .map(|(k, s)| SkRow {
                    k,
                    set: s.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
                })
                .collect();
            emit(&None, format, &rows)?;
            Ok(true)
        }
        DebugCommand::LdtDump { graph, seed, out } => {
            let (g, descriptor) = graph.load(seed)?;
            let largest = components(&g).swap_remove(0);
            let (comp, _) = g.induced(&largest)?;
            let n = comp.node_count() as u64;
            let ids = assign_random_ids(comp.node_count(), default_id_bound(n.max(2)), seed)?;
            let outcome = ldt_construct_round(&comp, &ids, n, &RunConfig::new(n.max(2), seed))?;
            let violation = match outcome.complete_states() {
                Some(s) => check_ldt(&comp, &ids, &s).err().map(|v| format!("{v:?}")),
                None => Some("some nodes failed".to_string()),
            };
            let dump = LdtDump {
                graph: descriptor,
                nodes: largest,
                ids: ids.ids(),
                valid: violation.is_none(),
                violation,
                max_awake: outcome.trace.max_awake(),
                total_rounds: outcome.trace.total_rounds,
                states: outcome.states.clone(),
            };
            let mut w = sink(&out)?;
            serde_json::to_writer_pretty(&mut w, &dump)?;
            writeln!(w)?;
            Ok(dump.valid)
        }
        DebugCommand::Params { n } => {
            let params = AwakeMisParams::new(n)?;
            println!("{}", serde_json::to_string_pretty(&params)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Verify { states, graph } => verify(&states, &graph),
        Command::Experiment(args) => experiment(args),
        Command::Gen { graph, seed, out } => graph.load(seed).and_then(|(g, _)| {
            sink(&out)?.write_all(g.to_edge_list().as_bytes())?;
            Ok(true)
        }),
        Command::Debug(cmd) => debug(cmd),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
