mod commands;
mod error;
mod output;
mod plot;
mod spec_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mfi_core::grid::DEFAULT_GRID_COUNT;
use mfi_core::transactional::SuperpositionMode;
use mfi_core::variational::{DEFAULT_GRADIENT_TOLERANCE, DEFAULT_MAX_ITERATIONS};
use mfi_core::FisherImage;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "mfi", version, about = "Minimum-Fisher-information strategies built from oscillator eigenstates")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,

    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Oscillator scale (default 1).
    #[arg(long, global = true)]
    pub mu: Option<f64>,

    /// Oscillator center.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, global = true)]
    pub m: f64,

    /// Grid points.
    #[arg(long, env = "MFI_GRID_COUNT", default_value_t = DEFAULT_GRID_COUNT, global = true)]
    pub grid_count: usize,

    /// Grid half-width; overrides the width derived from the states involved.
    #[arg(long, global = true)]
    pub half_width: Option<f64>,

    /// Seed for randomized initial guesses.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ImageArg {
    Physical,
    Transactional,
}

impl From<ImageArg> for FisherImage {
    fn from(v: ImageArg) -> Self {
        match v {
            ImageArg::Physical => FisherImage::Physical,
            ImageArg::Transactional => FisherImage::Transactional,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    CallerFixed,
    OwnMinimizer,
}

impl From<ModeArg> for SuperpositionMode {
    fn from(v: ModeArg) -> Self {
        match v {
            ModeArg::CallerFixed => SuperpositionMode::CallerFixed,
            ModeArg::OwnMinimizer => SuperpositionMode::OwnMinimizer,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fisher information, variance and Cramer-Rao product of one eigenstate.
    Eigen {
        /// Eigenstate index (0..=64).
        #[arg(long)]
        n: usize,
        /// Also write x, psi, dpsi/dx samples here.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Fisher information of the (0, 2) superposition against p, in units of 4 mu.
    Figure1 {
        /// Number of equally spaced p samples on [0, 1].
        #[arg(long, default_value_t = 10_001)]
        points: usize,
        /// Also write an SVG plot here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Closed-form Gibbs ensemble quantities for each d.
    Gibbs {
        /// Comma-separated dimensionless inverse temperatures, each > 0.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        d: Vec<f64>,
        /// Geometric tail mass at which the eigenstate series is truncated.
        #[arg(long, default_value_t = mfi_core::gibbs::DEFAULT_TAIL_TOLERANCE)]
        tail_tolerance: f64,
    },
    /// Rank the strategies listed in a file by Fisher information.
    Order {
        /// Strategy file, one `eigen`, `super` or `gibbs` line per strategy.
        #[arg(long)]
        spec: PathBuf,
        /// Compare at common mu (physical) or common risk (transactional).
        #[arg(long, value_enum, default_value_t = ImageArg::Physical)]
        image: ImageArg,
        /// Common risk for the transactional image.
        #[arg(long)]
        risk: Option<f64>,
        /// Use the listed superposition weight or each pair's own minimizer.
        #[arg(long, value_enum, default_value_t = ModeArg::CallerFixed)]
        mode: ModeArg,
    },
    /// Minimize the Fisher functional under norm, mean and risk constraints.
    Solve {
        /// Target risk (variance about the mean), > 0.
        #[arg(long)]
        risk: f64,
        /// Target mean (defaults to --m).
        #[arg(long, allow_negative_numbers = true)]
        mean: Option<f64>,
        /// Number of discrete eigenvalues to report.
        #[arg(long, default_value_t = 6)]
        count: usize,
        /// Write the iteration trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Iteration cap before reporting a convergence failure.
        #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
        max_iterations: usize,
        /// Stop once the projected gradient norm falls below this.
        #[arg(long, default_value_t = DEFAULT_GRADIENT_TOLERANCE)]
        tolerance: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = &cli.config;
    let result = match cli.command {
        Command::Eigen { n, samples } => commands::eigen(cfg, n, samples.as_deref()),
        Command::Figure1 { points, plot } => commands::figure1(cfg, points, plot.as_deref()),
        Command::Gibbs { d, tail_tolerance } => commands::gibbs(cfg, &d, tail_tolerance),
        Command::Order { spec, image, risk, mode } => commands::order(cfg, &spec, image.into(), risk, mode.into()),
        Command::Solve { risk, mean, count, trace, max_iterations, tolerance } => commands::solve(
            cfg,
            commands::SolveArgs { risk, mean, count, trace, max_iterations, tolerance },
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
