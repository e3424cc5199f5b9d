//! `clique-qml`: generate clique datasets, train the three circuit templates
//! and compare the resulting accuracy curves.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use clique_qml::training::{LossKind, TrainingSet};
use clique_qml::{AnsatzKind, Error};

/// Exit codes: 0 success, 1 usage, 2 data or generation, 3 numerical.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Usage = 1,
    Data = 2,
    Numerical = 3,
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { exit: Exit::Usage, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { exit: Exit::Data, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::Config(_) | Error::Usage(_) => Exit::Usage,
            Error::Generation(_) | Error::Parse(_) | Error::Io(_) => Exit::Data,
            Error::Numerical(_) => Exit::Numerical,
        };
        Self { exit, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::data(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "clique-qml", version, about = "Clique labelling with symmetry-restricted variational circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a balanced dataset of labeled Erdős–Rényi graphs.
    GenData(GenDataArgs),
    /// Train one ansatz over several seeds and write its accuracy curve.
    Train(TrainArgs),
    /// Compare final accuracies of one or more curve files.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct GenDataArgs {
    /// Number of nodes (one qubit per node).
    #[arg(long, default_value_t = 6)]
    pub qubits: usize,
    /// Clique size to label.
    #[arg(long, default_value_t = 4)]
    pub clique: usize,
    /// Number of graphs, split evenly between clique-bearing and blank.
    #[arg(long, default_value_t = 3000)]
    pub size: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Per-graph edge probability interval, drawn uniformly: `LO,HI`.
    #[arg(long, default_value = "0.3,0.9", value_parser = parse_range)]
    pub edge_prob_range: (f64, f64),
    /// Output file (line-delimited JSON).
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// perm, cyclic or standard.
    #[arg(long, value_parser = parse_ansatz)]
    pub ansatz: Option<AnsatzKind>,
    /// Dataset shared by all seeds. Without it each seed generates its own.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Re-run the configuration recorded in a manifest written by `train`.
    #[arg(long, conflicts_with_all = ["ansatz"])]
    pub from_manifest: Option<PathBuf>,
    /// Qubit count when generating datasets (ignored with --dataset).
    #[arg(long, default_value_t = 6)]
    pub qubits: usize,
    /// Clique size when generating datasets (ignored with --dataset).
    #[arg(long, default_value_t = 4)]
    pub clique: usize,
    /// Layer repetitions [default: 40 perm, 30 cyclic, 3 standard].
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    /// Number of seeds; seeds are FIRST_SEED, FIRST_SEED+1, ...
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,
    /// Graphs used for training; the rest of the dataset is validation.
    #[arg(long, default_value_t = 100)]
    pub train_size: usize,
    /// Dataset size when generating per seed.
    #[arg(long, default_value_t = 3000)]
    pub dataset_size: usize,
    #[arg(long, default_value_t = 20)]
    pub batch_size: usize,
    #[arg(long, default_value_t = clique_qml::training::DEFAULT_LEARNING_RATE)]
    pub lr: f64,
    /// Ridge added to the metric before solving.
    #[arg(long, default_value_t = 1e-3)]
    pub reg: f64,
    /// Initial parameters uniform in [-s, s].
    #[arg(long, default_value_t = 0.1)]
    pub init_scale: f64,
    #[arg(long, default_value = "0.3,0.9", value_parser = parse_range)]
    pub edge_prob_range: (f64, f64),
    /// mse or linear.
    #[arg(long, default_value = "mse", value_parser = parse_loss)]
    pub loss: LossKind,
    /// Draw a fresh balanced training set every epoch.
    #[arg(long)]
    pub resample: bool,
    #[arg(long, env = "CLIQUE_QML_OUT_DIR", default_value = "results")]
    pub out_dir: PathBuf,
    /// Print validation accuracy after every epoch.
    #[arg(long, short)]
    pub verbose: bool,
}

impl TrainArgs {
    pub fn training_set(&self) -> TrainingSet {
        if self.resample {
            TrainingSet::Resample
        } else {
            TrainingSet::Fixed
        }
    }
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Curve files with header `Epoch,Node_Avg,Node_Avg_Error`.
    #[arg(required = true)]
    pub csv: Vec<PathBuf>,
    /// Write the merged, plot-ready table here.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected LO,HI, got '{s}'"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{lo}: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{hi}: {e}"))?;
    Ok((lo, hi))
}

fn parse_ansatz(s: &str) -> Result<AnsatzKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_loss(s: &str) -> Result<LossKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Exit::Usage as u8) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::GenData(args) => commands::gen_data(&args),
        Command::Train(args) => commands::train(&args),
        Command::Report(args) => commands::report(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.exit as u8)
        }
    }
}
