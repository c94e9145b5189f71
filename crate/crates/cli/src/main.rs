//! `rmpi`: training, evaluation, schema pretraining, benchmark generation
//! and subgraph dumps.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "rmpi",
    version,
    about = "Relation-view subgraph reasoning for inductive KG completion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a model on a benchmark directory.
    Train(TrainArgs),
    /// Evaluate checkpoints by triple classification or entity ranking.
    Eval(EvalArgs),
    /// Pretrain schema vectors with TransE.
    SchemaPretrain(SchemaArgs),
    /// Combine the training side of one benchmark with the test side of another.
    Benchgen(BenchgenArgs),
    /// Write the relation-view graph around one triple as an edge list.
    DumpSubgraph(DumpArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VariantArg {
    Base,
    Ne,
    Ta,
    NeTa,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FusionArg {
    Sum,
    Conc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum InitArg {
    Random,
    Schema,
}

#[derive(Args, Debug, Serialize)]
struct TrainArgs {
    /// Benchmark directory (train.txt, valid.txt, test_graph.txt, test.txt).
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2)]
    hop: usize,
    #[arg(long, default_value_t = 2)]
    layers: usize,
    #[arg(long, default_value_t = 32)]
    dim: usize,
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    #[arg(long, default_value_t = 16)]
    batch: usize,
    #[arg(long, default_value_t = 10.0)]
    margin: f64,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    /// Epochs without validation improvement before stopping; 0 disables.
    #[arg(long, default_value_t = 10)]
    patience: usize,
    #[arg(long, default_value_t = 0.5)]
    dropout: f64,
    #[arg(long, default_value_t = 1)]
    negatives: usize,
    /// Keep negatives that happen to be known triples.
    #[arg(long)]
    allow_known_negatives: bool,
    #[arg(long, value_enum, default_value_t = VariantArg::Base)]
    variant: VariantArg,
    #[arg(long, value_enum, default_value_t = FusionArg::Sum)]
    fusion: FusionArg,
    #[arg(long, value_enum, default_value_t = InitArg::Random)]
    init: InitArg,
    /// Schema vector directory, required with `--init schema`.
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent runs with seeds `seed, seed+1, ...`.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TaskArg {
    Classify,
    Rank,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SidesArg {
    Both,
    Head,
    Tail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SplitArg {
    Test,
    Valid,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    /// Checkpoint directory, or a directory of `run_*` checkpoints.
    #[arg(long)]
    ckpt: PathBuf,
    /// Benchmark directory; targets come from its test (or valid) split.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value_t = TaskArg::Classify)]
    task: TaskArg,
    /// Corrupted candidates per ranking query.
    #[arg(long, default_value_t = 49)]
    neg: usize,
    /// Comma-separated cutoffs for Hits@n.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1, 5, 10])]
    hits: Vec<usize>,
    #[arg(long, value_enum, default_value_t = SidesArg::Both)]
    sides: SidesArg,
    #[arg(long, value_enum, default_value_t = SplitArg::Test)]
    split: SplitArg,
    /// Schema vector directory, required for SCHEMA-init checkpoints.
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report directory; defaults to `<ckpt>/eval`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args, Debug, Serialize)]
struct SchemaArgs {
    /// Schema triples, `subject<TAB>predicate<TAB>object`.
    #[arg(long)]
    schema: PathBuf,
    /// Export vectors for this benchmark's relations instead of every
    /// property node.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 300)]
    dim: usize,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    #[arg(long, default_value_t = 1.0)]
    margin: f64,
    #[arg(long, default_value_t = 128)]
    batch: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct BenchgenArgs {
    #[arg(long)]
    train_from: PathBuf,
    #[arg(long)]
    test_from: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GraphArg {
    Train,
    Test,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    Enclosing,
    Disclosing,
}

#[derive(Args, Debug, Serialize)]
struct DumpArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    head: String,
    #[arg(long)]
    rel: String,
    #[arg(long)]
    tail: String,
    #[arg(long, value_enum, default_value_t = GraphArg::Train)]
    graph: GraphArg,
    #[arg(long, value_enum, default_value_t = KindArg::Enclosing)]
    kind: KindArg,
    #[arg(long, default_value_t = 2)]
    hop: usize,
    /// Keep PARA/LOOP alongside the basic edge types they subsume.
    #[arg(long)]
    keep_basic: bool,
    /// Keep a graph fact identical to the target in the subgraph.
    #[arg(long)]
    keep_target_fact: bool,
    /// Output file; stdout when absent (no run manifest then).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Why a command failed, mapped to the exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::SchemaPretrain(a) => commands::schema_pretrain(a),
        Command::Benchgen(a) => commands::benchgen(a),
        Command::DumpSubgraph(a) => commands::dump_subgraph(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
