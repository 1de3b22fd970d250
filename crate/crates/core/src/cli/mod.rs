//! The `coastkrig` command line.
//!
//! Exit codes are a stable contract: [`EXIT_OK`] on success,
//! [`EXIT_RUNTIME`] for IO and numerical failures and [`EXIT_USAGE`] for bad
//! arguments or invalid input files.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};

pub use commands::{cmd_compare, cmd_fit, cmd_predict, cmd_simulate};
pub use config::{FileConfig, HoldoutSize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "coastkrig", version, about = "Bayesian kriging along a coastline")]
pub struct Cli {
    /// TOML file of settings; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the ellipse simulation study and write its tables.
    Simulate(SimulateArgs),
    /// Fit one model to observations along a coastline.
    Fit(FitArgs),
    /// Predict along the coastline from a fitted draws file.
    Predict(PredictArgs),
    /// Fit several models and compare holdout, DIC and cross-validation scores.
    Compare(CompareArgs),
}

/// Models available from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum ModelChoice {
    /// Along-curve distance, all parameters sampled.
    #[value(name = "full-mcmc", alias = "1b")]
    FullMcmc,
    /// Along-curve distance, decay and noise ratio fixed from the variogram.
    #[value(alias = "2b")]
    Conjugate,
    /// Euclidean distance, conjugate with variogram-fixed values.
    #[value(alias = "sk")]
    Euclidean,
    /// Euclidean distance with a linear trend in the coordinates, sampled.
    Uk,
}

impl ModelChoice {
    pub fn name(&self) -> &'static str {
        match self {
            ModelChoice::FullMcmc => "full-mcmc",
            ModelChoice::Conjugate => "conjugate",
            ModelChoice::Euclidean => "euclidean",
            ModelChoice::Uk => "uk",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(s, true).map_err(|_| Error::InvalidParameter(format!("unknown model '{s}'")))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SeedArgs {
    /// Random seed; every output is a pure function of inputs and seed
    /// [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct McmcArgs {
    /// Total MCMC iterations [default: 10000].
    #[arg(long)]
    pub iters: Option<usize>,
    /// Burn-in iterations [default: half of the iterations].
    #[arg(long)]
    pub burn: Option<usize>,
    /// Keep every n-th post burn-in draw [default: 1].
    #[arg(long)]
    pub thin: Option<usize>,
    /// Draws for the conjugate models [default: 5000].
    #[arg(long)]
    pub conjugate_draws: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PriorArgs {
    /// Uniform prior bounds on the decay [default: 0.8,30].
    #[arg(long, value_name = "LO,HI", num_args = 2, value_delimiter = ',')]
    pub phi_prior: Option<Vec<f64>>,
    /// Inverse-gamma shape and scale for the partial sill [default: 2,2].
    #[arg(long, value_name = "SHAPE,SCALE", num_args = 2, value_delimiter = ',')]
    pub sigma2_prior: Option<Vec<f64>>,
    /// Inverse-gamma shape and scale for the nugget [default: 2,2].
    #[arg(long, value_name = "SHAPE,SCALE", num_args = 2, value_delimiter = ',')]
    pub tau2_prior: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    /// Observations CSV (`lon,lat,y,...` or `x,y,value,...`).
    #[arg(long, value_name = "FILE")]
    pub observations: Option<PathBuf>,
    /// Coastline CSV of ordered vertices (`lon,lat` or `x,y`).
    #[arg(long, value_name = "FILE")]
    pub coastline: Option<PathBuf>,
    /// Model the natural log of the response.
    #[arg(long)]
    pub log_transform: bool,
    /// Covariate columns entering the mean besides the intercept.
    #[arg(long, value_delimiter = ',')]
    pub covariates: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Simulated points, three quarters used for training [default: 100].
    #[arg(long)]
    pub n: Option<usize>,
    /// Cross-validation folds, 0 to skip [default: 10].
    #[arg(long)]
    pub cv: Option<usize>,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub mcmc: McmcArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Model to fit [default: full-mcmc].
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    /// Output directory for `draws.csv` and `summary.csv`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub mcmc: McmcArgs,
    #[command(flatten)]
    pub priors: PriorArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PredictArgs {
    /// Draws CSV written by `fit`.
    #[arg(long, value_name = "FILE")]
    pub draws: Option<PathBuf>,
    /// The observations the draws were fitted to.
    #[arg(long, value_name = "FILE")]
    pub observations: Option<PathBuf>,
    /// The coastline the draws were fitted with.
    #[arg(long, value_name = "FILE")]
    pub coastline: Option<PathBuf>,
    /// Equally spaced points along the whole coastline [default: 100].
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..), conflicts_with = "targets")]
    pub n_points: Option<u64>,
    /// CSV of target locations, projected onto the coastline.
    #[arg(long, value_name = "FILE")]
    pub targets: Option<PathBuf>,
    /// Expected distance mode of the draws; a mismatch is an error.
    #[arg(long, value_parser = ["curve", "euclidean"])]
    pub distance: Option<String>,
    /// Predict the latent surface instead of a new measurement.
    #[arg(long)]
    pub latent: bool,
    /// Output prediction CSV.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Models to compare [default: full-mcmc,conjugate,euclidean,uk].
    #[arg(long, value_enum, value_delimiter = ',')]
    pub models: Option<Vec<ModelChoice>>,
    /// Rows held out for MSPE: a count or a fraction in (0, 1).
    #[arg(long, conflicts_with = "holdout_ids")]
    pub holdout: Option<HoldoutSize>,
    /// Explicit 0-based data rows to hold out.
    #[arg(long, value_delimiter = ',')]
    pub holdout_ids: Option<Vec<usize>>,
    /// Cross-validation folds on the training rows, 0 to skip [default: 10].
    #[arg(long)]
    pub cv: Option<usize>,
    /// Output directory for `report.csv` and `report.txt`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub mcmc: McmcArgs,
    #[command(flatten)]
    pub priors: PriorArgs,
}

/// Exit code for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_)
        | Error::OutOfDomain { .. }
        | Error::DimensionMismatch { .. }
        | Error::InsufficientData(_)
        | Error::Parse { .. }
        | Error::Mismatch(_)
        | Error::Csv(_) => EXIT_USAGE,
        Error::NotPositiveDefinite(_)
        | Error::RankDeficient
        | Error::NonFiniteLikelihood
        | Error::EmptyDraws
        | Error::Io(_) => EXIT_RUNTIME,
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, &file),
        Command::Fit(a) => cmd_fit(a, &file),
        Command::Predict(a) => cmd_predict(a, &file),
        Command::Compare(a) => cmd_compare(a, &file),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
