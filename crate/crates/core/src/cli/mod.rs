//! Command-line surface: `check`, `fit`, `diagnose`, `predict`, `simulate`.
//!
//! Exit codes of `check`: 0 no separation, 2 separation with every posterior
//! mean existing, 3 some mean does not exist, 4 some verdict unknown. Any
//! error exits with 1. `fit` also exits with 3 when it refuses to sample.

mod commands;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::samplers::Link;
use crate::simulate::Scenario;

pub use commands::{read_sidecar, Sidecar};

#[derive(Debug, Parser)]
#[command(name = "sepbayes", version, about = "Separation checks and Bayesian binary regression")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect separation and report posterior-mean existence per coefficient.
    Check(CheckArgs),
    /// Sample the posterior and write draws, reports and a run manifest.
    Fit(FitArgs),
    /// Summaries, autocorrelations and running means of a draws file.
    Diagnose(DiagnoseArgs),
    /// Score a fitted model on test data.
    Predict(PredictArgs),
    /// Write one of the simulated separation scenarios as CSV.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Input CSV file.
    pub data: PathBuf,
    /// Name of the 0/1 response column (`V<k>` without a header).
    #[arg(long, default_value = "y")]
    pub response: String,
    /// The CSV has no header row.
    #[arg(long)]
    pub no_header: bool,
    /// Use the covariates as given instead of centering and scaling them.
    #[arg(long)]
    pub no_standardize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorFamily {
    Cauchy,
    T,
    Normal,
    Mvt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaMatrix {
    /// `diag(σ_j²)` from the scale flags.
    Identity,
    /// `n (XᵀX)⁻¹` of the prepared design.
    ZellnerSiow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Gibbs,
    Metropolis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointEstimate {
    Mcmc,
    Map,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PriorArgs {
    #[arg(long, value_enum, default_value = "cauchy")]
    pub prior: PriorFamily,
    /// Degrees of freedom (default 7 for `t`, 1 for `mvt`).
    #[arg(long)]
    pub df: Option<f64>,
    /// Prior scale of the non-intercept coefficients.
    #[arg(long, default_value_t = 2.5)]
    pub scale: f64,
    /// Prior scale of the intercept.
    #[arg(long, default_value_t = 10.0)]
    pub scale_intercept: f64,
    /// Prior locations: one value for all coefficients or one per coefficient.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub location: Vec<f64>,
    #[arg(long, value_enum, default_value = "identity")]
    pub sigma_matrix: SigmaMatrix,
    #[arg(long, value_enum, default_value = "logit")]
    pub link: LinkArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkArg {
    Logit,
    Probit,
}

impl From<LinkArg> for Link {
    fn from(l: LinkArg) -> Link {
        match l {
            LinkArg::Logit => Link::Logit,
            LinkArg::Probit => Link::Probit,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    /// Also write the report to this directory as `report.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SamplerArgs {
    #[arg(long, value_enum, default_value = "gibbs")]
    pub sampler: SamplerKind,
    /// Iterations per chain, burn-in included.
    #[arg(long, default_value_t = 11_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1_000)]
    pub burnin: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Initial Metropolis proposal scale (adapted during burn-in).
    #[arg(long, default_value_t = 0.1)]
    pub step_scale: f64,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    /// Sample even when some posterior mean does not exist.
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value = "fit-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    /// Draws CSV written by `fit`.
    pub draws: PathBuf,
    /// Largest ACF lag written to `acf.csv`.
    #[arg(long, default_value_t = 100)]
    pub max_lag: usize,
    /// Write every k-th running mean (0 picks k so at most 10⁴ rows per chain).
    #[arg(long, default_value_t = 0)]
    pub stride: usize,
    /// Output directory (defaults to the directory of the draws file).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    /// Draws CSV written by `fit`; its `draws.json` sidecar must sit next to it.
    #[arg(long)]
    pub draws: PathBuf,
    /// Test CSV with the same columns as the training data.
    pub test: PathBuf,
    /// Standardization record (defaults to `standardization.json` next to the draws).
    #[arg(long)]
    pub record: Option<PathBuf>,
    #[arg(long, default_value = "y")]
    pub response: String,
    #[arg(long)]
    pub no_header: bool,
    #[arg(long, value_enum, default_value = "mcmc")]
    pub point_estimate: PointEstimate,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long, default_value = "predict-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

/// Provenance of one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub versions: Versions,
    /// Seconds since the Unix epoch.
    pub started_at: f64,
    pub finished_at: f64,
    pub outputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub sepbayes: String,
}

impl Default for Versions {
    fn default() -> Self {
        Versions {
            sepbayes: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

pub(crate) fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> crate::Result<i32> {
    match cli.command {
        Command::Check(a) => commands::check(&a),
        Command::Fit(a) => commands::fit(&a),
        Command::Diagnose(a) => commands::diagnose(&a),
        Command::Predict(a) => commands::predict(&a),
        Command::Simulate(a) => commands::simulate(&a),
    }
}

/// Parses `std::env::args`, runs, and maps errors to exit code 1.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
