use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod io;

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "srgeom", version, about = "Scaling-rotation distances and interpolation curves for SPD matrices")]
struct Cli {
    #[command(flatten)]
    config: Config,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Config {
    /// Weight of the rotation term.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub k: f64,

    /// Log-scale tolerance for treating eigenvalues as equal.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_eig: f64,

    /// Tolerance for ties between competing curve lengths.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_tie: f64,

    /// Points per sampled curve, endpoints included.
    #[arg(long, global = true, default_value_t = 101)]
    pub samples: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output directory for curve files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Config {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(CliError::Parse(format!("--k must be positive, got {}", self.k)));
        }
        if self.tol_eig.is_nan() || self.tol_tie.is_nan() || self.tol_eig <= 0.0 || self.tol_tie <= 0.0 {
            return Err(CliError::Parse("tolerances must be positive".into()));
        }
        if self.samples < 2 {
            return Err(CliError::Parse(format!("--samples must be at least 2, got {}", self.samples)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    #[value(name = "Wp", alias = "wp")]
    Wp,
    #[value(name = "Wprime", alias = "wprime")]
    Wprime,
    Random,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Scaling-rotation distance between two SPD matrices.
    Distance { x: PathBuf, y: PathBuf },
    /// Write every minimal curve between X and Y (p = 3) to --out.
    Interpolate { x: PathBuf, y: PathBuf },
    /// Classify the minimal curves between X and Y (p = 3).
    Classify { x: PathBuf, y: PathBuf },
    /// Stratum and eigen-decomposition fiber of X.
    Fiber { x: PathBuf },
    /// Look for a sign change that moves an involution closer to I.
    Reduce {
        /// File holding the involution R.
        r: Option<PathBuf>,
        /// Use a random involution of dimension P and level M instead.
        #[arg(long, num_args = 2, value_names = ["P", "M"], conflicts_with = "r")]
        random_involution: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Nearest coordinate plane to m-dimensional subspaces of R^p.
    GrassmannScan {
        p: usize,
        m: usize,
        #[arg(long, value_enum, default_value_t = Construction::Random)]
        construction: Construction,
        /// Number of random subspaces.
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = &cli.config;
    cfg.validate()?;
    match cli.cmd {
        Cmd::Distance { x, y } => commands::distance(&x, &y, cfg),
        Cmd::Interpolate { x, y } => commands::interpolate(&x, &y, cfg),
        Cmd::Classify { x, y } => commands::classify(&x, &y, cfg),
        Cmd::Fiber { x } => commands::fiber(&x, cfg),
        Cmd::Reduce { r, random_involution, seed } => {
            let source = match (r, random_involution) {
                (Some(path), None) => commands::InvolutionSource::File(path),
                (None, Some(pm)) => commands::InvolutionSource::Random { p: pm[0], m: pm[1], seed },
                _ => return Err(CliError::Parse("give an involution file or --random-involution P M".into())),
            };
            commands::reduce(source, cfg)
        }
        Cmd::GrassmannScan { p, m, construction, count, seed } => commands::scan(p, m, construction, count, seed, cfg),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
