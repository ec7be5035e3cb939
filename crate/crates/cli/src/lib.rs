//! Command-line front end for the `cohpure` library.
//!
//! Exit codes: 0 success, 2 input error, 3 optimizer did not converge (values
//! are still emitted), 4 an asserted invariant failed.

pub mod commands;
pub mod report;
pub mod statefile;
pub mod suites;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cohpure::coherence::Distance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_OPTIMIZER: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "COHPURE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "cohpure", version, about = "Coherence, purity and correlation quantifiers for density matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Purity report plus coherence values for a state file.
    Quantify(QuantifyArgs),
    /// Write the maximally coherent mixed state with a given spectrum.
    Mcms(McmsArgs),
    /// Decide unital convertibility between two states.
    Convert(ConvertArgs),
    /// Single-shot distillable purity.
    Distill(StateArg),
    /// Single-shot purity cost.
    Cost(StateArg),
    /// Purity, coherence and discord hierarchy of a bipartite state.
    Hierarchy(HierarchyArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Export a quantifier over a grid of qubit Bloch vectors as CSV.
    Bloch(BlochArgs),
    /// Write a seeded random density matrix.
    Random(RandomArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_distance(s: &str) -> std::result::Result<Distance, String> {
    s.parse::<Distance>().map_err(|e| e.to_string())
}

fn parse_dims(s: &str) -> std::result::Result<cohpure::Dims, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => {
            let a = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
            let b = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
            if a == 0 || b == 0 {
                return Err("subsystem dimensions must be positive".into());
            }
            Ok(cohpure::Dims(a, b))
        }
        _ => Err(format!("expected two comma-separated dimensions, got '{s}'")),
    }
}

#[derive(Debug, Args)]
pub struct QuantifyArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Distances for the distance-based quantifiers (default: the full menu).
    #[arg(long = "distance", value_parser = parse_distance, value_delimiter = ',')]
    pub distances: Vec<Distance>,
    /// Orders for the Renyi coherence quantifiers.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 2.0])]
    pub alpha: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for the optimizer restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
}

#[derive(Debug, Args)]
pub struct McmsArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub spectrum: Vec<f64>,
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub from: PathBuf,
    #[arg(long)]
    pub to: PathBuf,
}

#[derive(Debug, Args)]
pub struct StateArg {
    #[arg(long)]
    pub state: PathBuf,
}

#[derive(Debug, Args)]
pub struct HierarchyArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Subsystem dimensions `a,b`; defaults to the `dims` field of the file.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Option<cohpure::Dims>,
    #[arg(long, value_parser = parse_distance, default_value = "rel_entropy")]
    pub distance: Distance,
    #[arg(long)]
    pub seed: u64,
    /// Random candidates for the unitary searches.
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    /// Refinement sweeps for the unitary searches.
    #[arg(long, default_value_t = 20)]
    pub refine: usize,
    /// Candidates for the product-unitary search inside each discord bound
    /// evaluated by the max-hierarchy check.
    #[arg(long, default_value_t = 4)]
    pub inner_restarts: usize,
    #[arg(long, default_value_t = 2)]
    pub inner_refine: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Theorem1,
    Theorem2,
    Axioms,
    Majorization,
    #[value(name = "appendixG")]
    AppendixG,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct BlochArgs {
    /// Points per axis of the cube grid; points outside the ball are skipped.
    #[arg(long)]
    pub grid: usize,
    /// `c_l1`, `c_<distance>` or `p_<distance>`, for example `p_trace_norm`.
    #[arg(long)]
    pub quantifier: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub rank: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub label: Option<String>,
}

/// Runs a parsed command and returns its exit code. Errors are input errors.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Quantify(a) => commands::quantify(&a),
        Command::Mcms(a) => commands::mcms(&a),
        Command::Convert(a) => commands::convert(&a),
        Command::Distill(a) => commands::distill(&a),
        Command::Cost(a) => commands::cost(&a),
        Command::Hierarchy(a) => commands::hierarchy(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Bloch(a) => commands::bloch(&a),
        Command::Random(a) => commands::random(&a),
    }
}

/// Applies `COHPURE_THREADS` to the global thread pool.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got '{v}'"))?;
        if n == 0 {
            anyhow::bail!("{THREADS_ENV} must be a positive integer, got '{v}'");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
