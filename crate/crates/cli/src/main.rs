//! `hew`: generate, weight, verify and exhaustively analyze hypergraph
//! edge weightings from the command line.
//!
//! Exit codes: 0 success, 1 infeasible or not colorable, 2 search budget
//! exhausted, 3 usage error, 4 internal case failure.

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use hew_core::solver::{SolveMode, SolveOptions};
use hew_core::{
    build_ordering, complete_graph, cycle_graph, fano_plane, incidence_hypergraph,
    min_max_weight, random_hypergraph, random_linear_hypergraph, solve,
    strip_non_2edge_vertices, verify, Feasibility, Hypergraph, InitialWeights, OracleOutcome,
    SearchLimits, SolveError, Weighting,
};
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_INFEASIBLE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "hew",
    about = "Vertex-coloring edge weightings for hypergraphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate hypergraphs in the text interchange format.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Compute a vertex-coloring edge weighting within the mode's weight budget.
    Weight(WeightArgs),
    /// Verify a weighting against a hypergraph.
    Verify(VerifyArgs),
    /// Exact search for the minimal feasible maximum weight.
    Oracle(OracleArgs),
    /// Dump the derived ordering (debug aid) as JSON.
    Derive(DeriveArgs),
    /// Reproduce a built-in lower-bound experiment.
    Repro(ReproArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Complete graph on Q vertices.
    Complete { q: usize },
    /// The Fano plane (7 points, 7 lines).
    Fano,
    /// Cycle graph on N vertices.
    Cycle { n: usize },
    /// Incidence hypergraph of the input hypergraph.
    Incidence {
        /// Input file, or '-' for stdin.
        #[arg(default_value = "-")]
        input: String,
    },
    /// Seeded random linear hypergraph (pairwise edge intersections <= 1).
    RandomLinear {
        n: usize,
        m: usize,
        r: usize,
        seed: u64,
    },
    /// Seeded random hypergraph (duplicates and overlaps allowed).
    Random {
        n: usize,
        m: usize,
        r: usize,
        seed: u64,
    },
}

#[derive(Args)]
struct WeightArgs {
    /// Input hypergraph file, or '-' for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Solver: linear, r3, general, or auto (tightest applicable budget).
    #[arg(long, default_value = "auto")]
    mode: String,
    /// Initial vertex weights file (`vertex weight` lines or {"weights":[..]}).
    #[arg(long)]
    init: Option<PathBuf>,
    /// On an internal case failure, retry with bounded exact search.
    #[arg(long)]
    fallback_search: bool,
    /// Include the case trace in the JSON output.
    #[arg(long)]
    trace: bool,
    /// Emit the full solve report as JSON instead of the weighting format.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Hypergraph file, or '-' for stdin.
    hypergraph: String,
    /// Weighting file (`edge_index weight` lines or {"weights":[..]}).
    weights: PathBuf,
    /// Initial vertex weights file.
    #[arg(long)]
    init: Option<PathBuf>,
    /// Emit the verification report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Input hypergraph file, or '-' for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Largest maximum weight to try.
    #[arg(long, default_value_t = 5)]
    cap: i64,
    /// Abort after this many search nodes.
    #[arg(long)]
    budget_nodes: Option<u64>,
    /// Abort after this many seconds.
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Write the witness weighting to this file.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Worker threads for the top-level branch split.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Initial vertex weights file.
    #[arg(long)]
    init: Option<PathBuf>,
    /// Emit the oracle result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DeriveArgs {
    /// Input hypergraph file, or '-' for stdin.
    #[arg(default_value = "-")]
    input: String,
}

#[derive(Args)]
struct ReproArgs {
    /// One of: k4-incidence, fano-incidence, c6.
    name: String,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::from(EXIT_OK);
            }
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading stdin")?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load_hypergraph(path: &str) -> Result<Hypergraph> {
    let text = read_input(path)?;
    Hypergraph::parse(&text).map_err(|e| anyhow!("parsing hypergraph: {e}"))
}

fn load_init(path: &Option<PathBuf>, n: usize) -> Result<InitialWeights> {
    match path {
        None => Ok(InitialWeights::zero(n)),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {p:?}"))?;
            InitialWeights::parse(&text, n).map_err(|e| anyhow!("parsing init weights: {e}"))
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen(cmd) => run_gen(cmd),
        Command::Weight(args) => run_weight(args),
        Command::Verify(args) => run_verify(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Derive(args) => run_derive(args),
        Command::Repro(args) => run_repro(args),
    }
}

fn run_gen(cmd: GenCommand) -> Result<u8> {
    let h = match cmd {
        GenCommand::Complete { q } => complete_graph(q)?,
        GenCommand::Fano => fano_plane(),
        GenCommand::Cycle { n } => cycle_graph(n)?,
        GenCommand::Incidence { input } => {
            let f = load_hypergraph(&input)?;
            let (h, _) = incidence_hypergraph(&f)?;
            h
        }
        GenCommand::RandomLinear { n, m, r, seed } => random_linear_hypergraph(n, m, r, seed)?,
        GenCommand::Random { n, m, r, seed } => random_hypergraph(n, m, r, seed)?,
    };
    print!("{h}");
    Ok(EXIT_OK)
}

fn run_weight(args: WeightArgs) -> Result<u8> {
    let mode: SolveMode = args
        .mode
        .parse()
        .map_err(|e: String| anyhow!("{e}; expected linear, r3, general or auto"))?;
    let h = load_hypergraph(&args.input)?;
    let init = load_init(&args.init, h.n())?;
    let opts = SolveOptions {
        fallback_search: args.fallback_search,
    };
    match solve(&h, &init, mode, &opts) {
        Ok(mut report) => {
            if !args.trace {
                report.trace.clear();
            }
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.weights.to_text());
            }
            Ok(EXIT_OK)
        }
        Err(SolveError::NotColorable) => {
            eprintln!("not colorable: an edge consists of twins");
            Ok(EXIT_INFEASIBLE)
        }
        Err(SolveError::InternalCaseFailure(msg)) => {
            eprintln!("internal case failure: {msg}");
            Ok(EXIT_INTERNAL)
        }
        Err(e) => Err(anyhow!(e)),
    }
}

fn run_verify(args: VerifyArgs) -> Result<u8> {
    let h = load_hypergraph(&args.hypergraph)?;
    let wtext =
        std::fs::read_to_string(&args.weights).with_context(|| format!("{:?}", args.weights))?;
    let w = Weighting::parse(&wtext, h.m()).map_err(|e| anyhow!("parsing weighting: {e}"))?;
    let init = load_init(&args.init, h.n())?;
    let report = verify(&h, &w, &init)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else if report.proper {
        println!("proper");
    } else {
        println!("improper: monochromatic edges {:?}", report.monochromatic);
    }
    Ok(if report.proper { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn run_oracle(args: OracleArgs) -> Result<u8> {
    let h = load_hypergraph(&args.input)?;
    let init = load_init(&args.init, h.n())?;
    let limits = SearchLimits {
        max_nodes: args.budget_nodes.unwrap_or(u64::MAX),
        max_seconds: args.budget_seconds,
    };
    let result = min_max_weight(&h, args.cap, &init, limits, args.jobs.max(1))
        .map_err(|e| anyhow!("oracle: {e}"))?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&result)?);
    }
    match &result.outcome {
        OracleOutcome::KMin { k_min, witness } => {
            if !args.json {
                println!("k_min = {k_min} (nodes searched: {})", result.nodes);
            }
            if let Some(path) = &args.witness {
                std::fs::write(path, witness.to_text())
                    .with_context(|| format!("writing {path:?}"))?;
            }
            Ok(EXIT_OK)
        }
        OracleOutcome::ExceedsCap { cap } => {
            if !args.json {
                println!("infeasible under cap {cap} (nodes searched: {})", result.nodes);
            }
            Ok(EXIT_INFEASIBLE)
        }
        OracleOutcome::BudgetExhausted { last_k } => {
            if !args.json {
                println!("budget exhausted while testing k = {last_k}");
            }
            Ok(EXIT_BUDGET)
        }
    }
}

fn run_derive(args: DeriveArgs) -> Result<u8> {
    let h = load_hypergraph(&args.input)?;
    let (reduced, strip) =
        strip_non_2edge_vertices(&h).map_err(|e| anyhow!("reduction failed: {e}"))?;
    let ordering = build_ordering(&reduced).map_err(|e| anyhow!("ordering failed: {e}"))?;
    #[derive(serde::Serialize)]
    struct Dump {
        stripped_vertices: Vec<usize>,
        ordering: hew_core::DerivedOrdering,
    }
    let dump = Dump {
        stripped_vertices: strip.deleted,
        ordering,
    };
    println!("{}", serde_json::to_string_pretty(&dump)?);
    Ok(EXIT_OK)
}

fn run_repro(args: ReproArgs) -> Result<u8> {
    #[derive(serde::Serialize)]
    struct ReproReport {
        name: String,
        expected: String,
        observed: String,
        confirmed: bool,
    }
    let (name, expected, observed, confirmed) = match args.name.as_str() {
        "k4-incidence" => {
            let (h, _) = incidence_hypergraph(&complete_graph(4)?)?;
            let init = InitialWeights::zero(h.n());
            let infeasible_3 = matches!(
                hew_core::exists_weighting(&h, 3, &init, SearchLimits::default())?,
                (Feasibility::Infeasible, _)
            );
            let r = min_max_weight(&h, 6, &init, SearchLimits::default(), 1)?;
            let k_min = match r.outcome {
                OracleOutcome::KMin { k_min, .. } => k_min,
                _ => 0,
            };
            (
                "k4-incidence",
                "lower bound 4 (weight set {1..3} insufficient)".to_string(),
                format!("k = 3 infeasible: {infeasible_3}; exact k_min = {k_min}"),
                infeasible_3 && k_min == 4,
            )
        }
        "fano-incidence" => {
            let (h, _) = incidence_hypergraph(&fano_plane())?;
            let init = InitialWeights::zero(h.n());
            let infeasible_2 = matches!(
                hew_core::exists_weighting(&h, 2, &init, SearchLimits::default())?,
                (Feasibility::Infeasible, _)
            );
            let r = min_max_weight(&h, 5, &init, SearchLimits::default(), 1)?;
            let k_min = match r.outcome {
                OracleOutcome::KMin { k_min, .. } => k_min,
                _ => 0,
            };
            (
                "fano-incidence",
                "lower bound 3 (weight set {1,2} insufficient)".to_string(),
                format!("k = 2 infeasible: {infeasible_2}; exact k_min = {k_min}"),
                infeasible_2 && k_min >= 3,
            )
        }
        "c6" => {
            let h = cycle_graph(6)?;
            let init = InitialWeights::zero(6);
            let infeasible_2 = matches!(
                hew_core::exists_weighting(&h, 2, &init, SearchLimits::default())?,
                (Feasibility::Infeasible, _)
            );
            let feasible_3 = matches!(
                hew_core::exists_weighting(&h, 3, &init, SearchLimits::default())?,
                (Feasibility::Found(_), _)
            );
            (
                "c6",
                "k = 2 infeasible, k = 3 feasible".to_string(),
                format!("k = 2 infeasible: {infeasible_2}; k = 3 feasible: {feasible_3}"),
                infeasible_2 && feasible_3,
            )
        }
        other => return Err(anyhow!("unknown experiment '{other}'")),
    };
    let report = ReproReport {
        name: name.to_string(),
        expected,
        observed,
        confirmed,
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{}: expected {}", report.name, report.expected);
        println!("observed: {}", report.observed);
        println!(
            "{}",
            if report.confirmed {
                "confirmed"
            } else {
                "NOT CONFIRMED"
            }
        );
    }
    Ok(if report.confirmed { EXIT_OK } else { EXIT_INFEASIBLE })
}
