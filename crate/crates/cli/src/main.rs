//! `semanc`: command-line access to the semanc-core library.
//!
//! Every invocation writes one JSON report (or a CSV table with
//! `--format csv`) to stdout. Diagnostics go to stderr.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "semanc", version, about = "Semantic encodings of knowledge bases in neural networks")]
pub struct Cli {
    /// Output format for the result.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for every random choice; drawn and echoed when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Parse a knowledge base or logic program and print its structure.
    Parse(KbArgs),
    /// Enumerate the models of a knowledge base.
    Models(ModelsArgs),
    /// Decide whether one knowledge base entails another.
    Entail(EntailArgs),
    /// Apply the immediate-consequence operator of a logic program.
    Tp(TpArgs),
    /// Compile a logic program into a threshold network.
    Compile(CompileArgs),
    /// Run a network from an initial state until it repeats.
    Simulate(SimulateArgs),
    /// Compute the limit set of a network.
    Xinf(XinfArgs),
    /// Check whether a network is a neural model of a knowledge base.
    Verify(VerifyArgs),
    /// Measure how well a network or a probability vector fits a knowledge base.
    Fidelity(FidelityArgs),
    /// Train a feedforward network on data and knowledge-base losses.
    Train(TrainArgs),
    /// Symbolic complexity of every model of a knowledge base.
    Complexity(ComplexityArgs),
    /// Learning-theory experiments.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct KbArgs {
    pub file: PathBuf,
    /// prop, fol, program, penalty or fuzzy (guessed from the text by default).
    #[arg(long)]
    pub kind: Option<String>,
}

#[derive(Args, Debug)]
pub struct ModelsArgs {
    #[command(flatten)]
    pub kb: KbArgs,
    /// List at most this many models.
    #[arg(long, default_value_t = 4096)]
    pub limit: usize,
}

#[derive(Args, Debug)]
pub struct EntailArgs {
    pub kb: PathBuf,
    pub query: PathBuf,
    #[arg(long)]
    pub kind: Option<String>,
}

#[derive(Args, Debug)]
pub struct TpArgs {
    pub program: PathBuf,
    /// Comma-separated atoms true in the starting interpretation.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    pub program: PathBuf,
    /// Write the network JSON here as well.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub net: PathBuf,
    /// Initial state: a bit string (`0110`) or comma-separated values.
    #[arg(long)]
    pub init: String,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
}

#[derive(Args, Debug)]
pub struct XinfArgs {
    pub net: PathBuf,
    /// Keep only stable states (period-1 cycles).
    #[arg(long)]
    pub stable_only: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub net: PathBuf,
    pub kb: PathBuf,
    /// `nat` (atom roles of the network) or a path to an encoding JSON file.
    #[arg(long, default_value = "nat")]
    pub encoding: String,
    /// union or intersection; overrides the encoding file.
    #[arg(long)]
    pub agg: Option<String>,
    #[arg(long)]
    pub stable_only: bool,
    #[arg(long)]
    pub kind: Option<String>,
}

#[derive(Args, Debug)]
pub struct FidelityArgs {
    pub kb: PathBuf,
    /// JSON object of atom probabilities.
    #[arg(long, conflicts_with = "net")]
    pub prob: Option<PathBuf>,
    /// Network JSON to grade.
    #[arg(long)]
    pub net: Option<PathBuf>,
    /// hausdorff, fuzzy or prob.
    #[arg(long)]
    pub measure: Option<String>,
    #[arg(long, default_value = "nat")]
    pub encoding: String,
    #[arg(long)]
    pub agg: Option<String>,
    #[arg(long)]
    pub stable_only: bool,
    /// discrete or eq1.
    #[arg(long, default_value = "eq1")]
    pub base: String,
    #[arg(long, default_value_t = 1.0)]
    pub d_max: f64,
    /// min or product.
    #[arg(long, default_value = "min")]
    pub sat_agg: String,
    #[arg(long, default_value = "product")]
    pub tnorm: String,
    #[arg(long)]
    pub kind: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct TrainFlags {
    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,
    #[arg(long, default_value_t = 2000)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_kb: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_data: f64,
    /// `min` or `softmin:T`.
    #[arg(long, default_value = "softmin:0.1")]
    pub quant: String,
    /// neglog or oneminus.
    #[arg(long, default_value = "neglog")]
    pub loss: String,
    #[arg(long, default_value = "product")]
    pub tnorm: String,
    /// Redraw parameters uniformly from [-init, init] before training.
    #[arg(long)]
    pub init: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    pub net: PathBuf,
    pub data: PathBuf,
    pub kb: PathBuf,
    /// CSV whose header names the variables and whose rows are groundings.
    pub groundings: PathBuf,
    /// Distributed-atoms encoding JSON describing the network's slots.
    #[arg(long)]
    pub encoding: PathBuf,
    #[command(flatten)]
    pub train: TrainFlags,
    /// Write the trained network JSON here.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Write the per-epoch history CSV here.
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ComplexityArgs {
    #[command(flatten)]
    pub kb: KbArgs,
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 8)]
    pub max_exact: usize,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[command(subcommand)]
    pub which: Experiment,
}

#[derive(Subcommand, Debug)]
pub enum Experiment {
    /// Conditioning on L': synthetic (two KB files) or trained (task CSV).
    Prop1(Prop1Args),
    /// Probability ratio after adding L' versus direct recomputation.
    Prop2(Prop2Args),
    /// Low-complexity model distribution of a knowledge base.
    Kdist(KdistArgs),
}

#[derive(Args, Debug)]
pub struct Prop1Args {
    /// Task CSV, or a knowledge base file for the synthetic check.
    pub task: PathBuf,
    /// Extra knowledge base L'.
    pub extra: Option<PathBuf>,
    /// Label hierarchy used as L' for tasks, e.g. `cat<animal,dog<animal`.
    #[arg(long)]
    pub order: Option<String>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 2)]
    pub hidden: usize,
    #[arg(long)]
    pub closed_world: bool,
    #[arg(long, default_value = "pow2")]
    pub f: String,
    #[command(flatten)]
    pub train: TrainFlags,
}

#[derive(Args, Debug)]
pub struct Prop2Args {
    pub kb: PathBuf,
    pub extra: PathBuf,
    #[arg(long, default_value = "pow2")]
    pub f: String,
}

#[derive(Args, Debug)]
pub struct KdistArgs {
    pub kb: PathBuf,
    #[arg(long, default_value = "pow2")]
    pub f: String,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or unreadable input (exit 2).
    Usage(String),
    /// A well-formed request the library rejected (exit 1).
    Domain(String),
}

impl From<semanc_core::Error> for Failure {
    fn from(e: semanc_core::Error) -> Self {
        use semanc_core::encoding::EncodingError;
        use semanc_core::logic::LogicError;
        use semanc_core::network::NetworkError;
        use semanc_core::Error as E;
        let parse = matches!(
            &e,
            E::Logic(LogicError::Syntax { .. } | LogicError::ArityMismatch { .. } | LogicError::Unbound { .. })
                | E::Network(NetworkError::Json(_) | NetworkError::Invalid(_))
                | E::Encoding(EncodingError::Json(_) | EncodingError::Invalid(_))
        );
        if parse {
            Failure::Usage(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

macro_rules! impl_from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                semanc_core::Error::from(e).into()
            }
        }
    )*};
}

impl_from_core!(
    semanc_core::logic::LogicError,
    semanc_core::network::NetworkError,
    semanc_core::encoding::EncodingError,
    semanc_core::fidelity::FidelityError,
    semanc_core::soft::SoftError,
    semanc_core::theory::TheoryError
);

/// What a subcommand hands back: the JSON payload, its echoed
/// configuration, and optionally a table for CSV output.
pub struct Outcome {
    pub config: Value,
    pub result: Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub struct Ctx {
    pub seed: u64,
    pub inputs: Vec<Value>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let seed = cli.seed.unwrap_or_else(|| {
        let s: u64 = rand::random();
        eprintln!("seed: {s}");
        s
    });
    let mut ctx = Ctx { seed, inputs: Vec::new() };
    let start = Instant::now();
    let name = subcommand_name(&cli.cmd);
    match commands::run(&cli.cmd, &mut ctx) {
        Ok(out) => {
            let wall = start.elapsed().as_secs_f64() * 1000.0;
            match (cli.format, out.table) {
                (Format::Csv, Some(t)) => {
                    if let Err(e) = write_csv(&t) {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                }
                _ => {
                    let report = json!({
                        "subcommand": name,
                        "inputs": ctx.inputs,
                        "config": out.config,
                        "result": out.result,
                        "wall_time_ms": wall,
                        "seed": seed,
                    });
                    println!("{}", serde_json::to_string(&report).expect("JSON values serialize"));
                }
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn subcommand_name(c: &Cmd) -> &'static str {
    match c {
        Cmd::Parse(_) => "parse",
        Cmd::Models(_) => "models",
        Cmd::Entail(_) => "entail",
        Cmd::Tp(_) => "tp",
        Cmd::Compile(_) => "compile",
        Cmd::Simulate(_) => "simulate",
        Cmd::Xinf(_) => "xinf",
        Cmd::Verify(_) => "verify",
        Cmd::Fidelity(_) => "fidelity",
        Cmd::Train(_) => "train",
        Cmd::Complexity(_) => "complexity",
        Cmd::Experiment(e) => match e.which {
            Experiment::Prop1(_) => "experiment prop1",
            Experiment::Prop2(_) => "experiment prop2",
            Experiment::Kdist(_) => "experiment kdist",
        },
    }
}

fn write_csv(t: &Table) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(&t.header)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
