//! Command-line front door: instance generation, solving, certification and
//! experiments, with reproducible artifacts.
//!
//! Exit codes: 0 completed, 2 infeasible / certified absent, 3 input error,
//! 4 budget exhausted without a certificate.

mod ops;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use necklace_core::Rat;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "necklace-lab",
    about = "Fair splittings of multidimensional necklaces: solvers, certificates, experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Master seed for all randomness (falls back to NECKLACE_LAB_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the artifact to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Artifact format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Include exact linear systems in certificates.
    #[arg(long, global = true)]
    verbose: bool,
}

impl Common {
    pub fn effective_seed(&self) -> u64 {
        self.seed
            .or_else(|| std::env::var("NECKLACE_LAB_SEED").ok().and_then(|v| v.parse().ok()))
            .unwrap_or(0)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact fair-splitting search for a 1-D grid coloring.
    #[command(name = "solve-1d")]
    Solve1d {
        #[command(flatten)]
        common: Common,
        /// Grid coloring instance (kind "grid").
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        q: u32,
        /// Exact number of cuts.
        #[arg(long)]
        t: usize,
        /// Minimum gap between consecutive cuts and box faces.
        #[arg(long, default_value = "0/1")]
        gamma: Rat,
        /// Left end of the necklace box (default: domain start).
        #[arg(long)]
        box_lo: Option<Rat>,
        /// Right end of the necklace box (default: domain end).
        #[arg(long)]
        box_hi: Option<Rat>,
    },
    /// Numerical fair-splitting search for a grid coloring in d >= 2.
    #[command(name = "solve-md")]
    SolveMd {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value = "0/1")]
        gamma: Rat,
        #[arg(long, default_value_t = 2000)]
        budget_patterns: usize,
        #[arg(long, default_value_t = 4)]
        budget_seeds: u32,
        #[arg(long, default_value_t = 60)]
        budget_iters: u32,
    },
    /// Fair splitting of a discrete necklace via the lexicographic lift.
    LiftSplit {
        #[command(flatten)]
        common: Common,
        /// Discrete necklace instance (kind "discrete").
        #[arg(long)]
        instance: PathBuf,
    },
    /// Exact minimum cut count of a discrete necklace (any dimension).
    MinCuts {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        instance: PathBuf,
        /// Override the intended part count of the instance.
        #[arg(long)]
        q: Option<u32>,
        /// Search cap (default: the lift-splitter bound).
        #[arg(long)]
        t_cap: Option<usize>,
        /// Per-axis cut budgets, comma separated.
        #[arg(long, value_delimiter = ',')]
        per_axis: Option<Vec<usize>>,
    },
    /// Generate an adversarial grid coloring on the window [-n, n]^d.
    GenAdversary {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Window half-extent.
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Exact 1-D no-splitting certificate for an adversarial coloring.
    #[command(name = "certify-1d")]
    Certify1d {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Granularity floor (default 1/n).
        #[arg(long)]
        gamma: Option<Rat>,
        /// Certify an existing grid instance instead of generating one.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Stochastic no-splitting probe for d >= 2 (never a certificate).
    #[command(name = "probe-md")]
    ProbeMd {
        #[command(flatten)]
        common: Common,
        /// Grid instance; generated adversarially when omitted.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        gamma: Option<Rat>,
        #[arg(long, default_value_t = 6)]
        boxes: usize,
        #[arg(long, default_value_t = 300)]
        budget_patterns: usize,
        #[arg(long, default_value_t = 3)]
        budget_seeds: u32,
        #[arg(long, default_value_t = 40)]
        budget_iters: u32,
    },
    /// Degrees-of-freedom threshold audit.
    AuditDof {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        t: usize,
        /// Cut family.
        #[arg(long, value_enum, default_value_t = CutsArg::Axis)]
        cuts: CutsArg,
        /// Whether the necklace floats in a window or is fixed.
        #[arg(long, value_enum, default_value_t = TargetArg::Window)]
        target: TargetArg,
    },
    /// Search for two equally colored cubes, or audit color thresholds.
    Distinguish {
        #[command(flatten)]
        common: Common,
        /// Grid instance to search (search mode).
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Required separation: A \ B contains a sigma-cube.
        #[arg(long, default_value = "1/8")]
        sigma: Rat,
        /// Audit mode: report the guaranteed color threshold instead.
        #[arg(long)]
        audit: bool,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, value_enum, default_value_t = ShapeArg::Cube)]
        shape: ShapeArg,
    },
    /// Subset-counting experiments for the discrete lower bound.
    CountDiscrete {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        t: usize,
        /// Also search for a hard subset at these parameters.
        #[arg(long)]
        hard: bool,
    },
    /// Deterministic micro-experiment suite (timings go to stderr).
    Bench {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum CutsArg {
    Axis,
    Arbitrary,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum TargetArg {
    Window,
    Fixed,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum ShapeArg {
    Cube,
    Cuboid,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match ops::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
