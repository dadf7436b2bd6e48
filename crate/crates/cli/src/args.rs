use std::path::PathBuf;

use arw_core::engine::Policy;
use arw_core::experiments::HockeyMode;
use arw_core::Seed;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "arw", version, about = "Activated random walk laboratory")]
pub struct Cli {
    /// key=value file with defaults for any long flag; flags on the
    /// command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for replicas, trials and sweep cells.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density profile D_rho against rho.
    Hockey(HockeyArgs),
    /// Critical density estimate.
    Critical(CriticalArgs),
    /// Grid of critical-density estimates.
    Sweep(SweepArgs),
    /// Stabilize a configuration snapshot.
    Stabilize(StabilizeArgs),
    /// Extended odometers and layer percolation.
    Layer {
        #[command(subcommand)]
        action: LayerAction,
    },
}

#[derive(Debug, Args)]
pub struct HockeyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.8)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.25)]
    pub rho_max: f64,
    /// Grid step in rho.
    #[arg(long, default_value_t = 0.01)]
    pub grid: f64,
    #[arg(long, default_value = "0")]
    pub seed: Seed,
    #[arg(long, default_value = "incremental", value_parser = parse_mode)]
    pub mode: HockeyMode,
    /// Instruction budget per particle in units of n^2.
    #[arg(long, default_value_t = 64)]
    pub budget_factor: u64,
    /// Also write an SVG plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Reference level for the min(rho, zeta) overlay; defaults to the plateau.
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long, default_value = "hockey.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Fe,
    Dd,
    Plateau,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "fe")]
    pub method: MethodArg,
    /// Fixed-energy trials per estimate.
    #[arg(long, default_value_t = 31)]
    pub trials: usize,
    #[arg(long, default_value_t = 64)]
    pub budget_factor: u64,
    /// Driven-dissipative burn-in additions.
    #[arg(long, default_value_t = 5000)]
    pub burn_in: u64,
    /// Driven-dissipative sampled additions.
    #[arg(long, default_value_t = 5000)]
    pub samples: u64,
    #[arg(long, default_value = "0")]
    pub seed: Seed,
    #[arg(long, default_value = "critical.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated sleep rates.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub lambdas: Vec<f64>,
    /// Comma-separated system sizes.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "plateau")]
    pub methods: Vec<MethodArg>,
    #[arg(long, default_value_t = 1.25)]
    pub rho_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub grid: f64,
    #[arg(long, default_value_t = 31)]
    pub trials: usize,
    #[arg(long, default_value_t = 64)]
    pub budget_factor: u64,
    #[arg(long, default_value = "0")]
    pub seed: Seed,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StabilizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the seed recorded in the snapshot.
    #[arg(long)]
    pub seed: Option<Seed>,
    /// sweep, leftmost, random or random:<seed>.
    #[arg(long, default_value = "sweep")]
    pub policy: String,
    /// Instruction budget; unlimited if absent.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Output prefix: <prefix>.snapshot, <prefix>.odometer.csv, <prefix>.summary.
    #[arg(long, default_value = "stabilized")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum LayerAction {
    /// Minimal odometer.
    Min(LayerArgs),
    /// Infection sets of the windowed class.
    Enum(LayerArgs),
    /// k-greedy path.
    Greedy(LayerArgs),
    /// zeta*(k) estimate.
    ZetaStar(LayerArgs),
}

#[derive(Debug, Args, Clone)]
pub struct LayerArgs {
    /// Interval length; greedy defaults to horizon - 1.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.8)]
    pub lambda: f64,
    /// zero, const:<c>, uniform:<particles> or a comma list of counts.
    #[arg(long, default_value = "zero")]
    pub sigma: String,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub u0: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub f0: i64,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 48)]
    pub horizon: usize,
    #[arg(long, default_value_t = 400)]
    pub replicas: usize,
    /// Bound on |u(v) - m(v)| for enumeration.
    #[arg(long, default_value_t = 40)]
    pub window_cap: u64,
    #[arg(long, default_value = "0")]
    pub seed: Seed,
    /// Cross-check enumeration against the brute-force oracle.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value = "layer.csv")]
    pub out: PathBuf,
}

fn parse_mode(s: &str) -> Result<HockeyMode, String> {
    s.parse().map_err(|e: arw_core::ArwError| e.to_string())
}

pub fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse().map_err(|e: arw_core::ArwError| e.to_string())
}
