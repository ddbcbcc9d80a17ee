use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Simulators, couplings and exact oracles for the SSEP with traps and the
/// facilitated exclusion and zero-range processes.
#[derive(Debug, Parser, Serialize)]
#[command(name = "swt", version, propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Master seed for every random stream [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to the number of cores)
    #[arg(long, global = true, env = "SWT_WORKERS")]
    pub workers: Option<usize>,
    /// Output file; a manifest is written next to it as FILE.manifest.json
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Turn checks into failures (exit code 1)
    #[arg(long = "assert", global = true)]
    pub assert: bool,
    /// JSON experiment file supplying defaults for family, sizes, grids and budgets
    #[arg(long, global = true, value_name = "FILE")]
    pub experiment: Option<PathBuf>,
    /// Largest state space the exact oracle may enumerate
    #[arg(long, global = true, default_value_t = 2_000_000)]
    pub max_states: usize,
    /// Largest number of Monte Carlo samples a single estimate may use
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub max_samples: u64,
    /// Largest simulation horizon
    #[arg(long, global = true, default_value_t = 1e7)]
    pub max_horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Simulate one trajectory and write its event log
    Simulate(SimulateArgs),
    /// Map configurations or trajectories between the processes
    Map(MapArgs),
    /// Run a coupling and check its pathwise properties at every event
    Coupling(CouplingArgs),
    /// Spectral and analytic time scales and bounds
    Spectral(SpectralArgs),
    /// Exact semigroup values and generator powers on the reachable state space
    Oracle(OracleArgs),
    /// Monte Carlo transience probability with a Wilson interval
    Transience(TransienceArgs),
    /// Bracket for the ε-transience time by bisection
    Theta(ThetaArgs),
    /// Transience profiles on a grid of multiples of K² log K / π²
    Cutoff(CutoffArgs),
    /// SSEP mixing upper bound from a meeting coupling, optionally with exact SWT values
    Mixing(MixingArgs),
    /// Exact counterexamples to preservation of negative dependence
    Negdep(NegdepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessArg {
    Swt,
    Fep,
    Fzr,
    Segment,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Process; inferred from the configuration tag when omitted
    #[arg(long, value_enum)]
    pub process: Option<ProcessArg>,
    /// Initial configuration, e.g. "S:1,-1" or "F:1,1,0,0"
    #[arg(long)]
    pub config: String,
    #[arg(long, default_value_t = 10.0)]
    pub horizon: f64,
    /// Trajectory index within the master seed
    #[arg(long, default_value_t = 0)]
    pub trajectory: u64,
    /// Also log rings that change nothing
    #[arg(long)]
    pub log_noops: bool,
    /// Stop at the first exit from the transient class
    #[arg(long)]
    pub stop_at_exit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Fep2swt,
    Swt2fep,
    Fep2fzr,
    Fzr2fep,
}

#[derive(Debug, Args, Serialize)]
pub struct MapArgs {
    #[arg(long, value_enum)]
    pub direction: Direction,
    /// A configuration string, or a file holding one or an NDJSON trajectory
    #[arg(long)]
    pub input: String,
    /// Tagged FEP particle site (0-based) for fep2swt and fep2fzr
    #[arg(long)]
    pub tag: Option<usize>,
    /// Site of the first particle in the output for swt2fep and fzr2fep
    #[arg(long, default_value_t = 0)]
    pub origin: usize,
    /// FEP ring size for swt2fep and fzr2fep
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    Basic,
    Labelled,
    Unrolled,
    Domination,
    Survival,
}

#[derive(Debug, Args, Serialize)]
pub struct CouplingArgs {
    #[arg(long, value_enum)]
    pub kind: CouplingKind,
    /// SWT configuration (the upper one for the basic coupling)
    #[arg(long)]
    pub config: String,
    /// Lower SWT configuration for the basic coupling
    #[arg(long)]
    pub lower: Option<String>,
    #[arg(long, default_value_t = 100.0)]
    pub horizon: f64,
    /// Number of seeds (trajectories) to run
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// First site of the segment A (1-based)
    #[arg(long, default_value_t = 1)]
    pub segment_start: usize,
    /// Length a of the segment A
    #[arg(long, default_value_t = 2)]
    pub segment_len: usize,
    /// Times for the survival comparison
    #[arg(long, value_delimiter = ',', default_values_t = vec![16.0, 32.0, 64.0])]
    pub times: Vec<f64>,
    /// Monte Carlo samples for the survival comparison
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectralArgs {
    /// Ring sizes
    #[arg(long = "K", value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    /// Excess values
    #[arg(long, value_delimiter = ',', default_values_t = vec![0])]
    pub s: Vec<usize>,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    /// Constant in the transience bounds (calibrated when omitted)
    #[arg(long)]
    pub constant: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub process: Option<ProcessArg>,
    /// Seed configuration, e.g. "S:-3,1,1,1,0,-1,0"
    #[arg(long)]
    pub seed_config: String,
    /// Times at which to evaluate the semigroup
    #[arg(long, value_delimiter = ',')]
    pub time: Vec<f64>,
    /// "transient", or a product of site indicators such as "6=1*7=1" (sites from 1)
    #[arg(long, default_value = "transient")]
    pub observable: String,
    /// Also report the generator powers 0..=n applied to the observable
    #[arg(long)]
    pub power: Option<usize>,
    /// Certified truncation tolerance
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct TargetArgs {
    /// Family member as NAME:SIZE[:EXTRA], e.g. "single-deep-trap-critical:16"
    #[arg(long, conflicts_with = "config")]
    pub family: Option<String>,
    /// Explicit SWT configuration
    #[arg(long)]
    pub config: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct TransienceArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, value_delimiter = ',')]
    pub time: Vec<f64>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Also compute the exact probability with the oracle
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ThetaArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub initial_samples: Option<u64>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Censoring horizon (default 4 K² log K / π²)
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub rel_width: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CutoffArgs {
    /// Family name, e.g. "single-deep-trap-critical"
    #[arg(long)]
    pub family: Option<String>,
    /// Trap count or seed for families that take one
    #[arg(long)]
    pub extra: Option<u64>,
    #[arg(long = "K", value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Grid of times in units of K² log K / π²
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct MixingArgs {
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Also compute the exact SWT sandwich values with the oracle
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct NegdepArgs {}
