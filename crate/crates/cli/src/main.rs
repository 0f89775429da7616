//! `loglindley` command-line front end.

mod commands;
mod format;
mod params;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use loglindley::Error;

/// Exit statuses.
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_FIT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "loglindley", version, about = "Log-Lindley generated distributions: fitting, comparison and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct FitArgs {
    /// Data file path, `-` for stdin, or `bjerkedal` for the embedded dataset.
    #[arg(long)]
    data: String,
    /// Number of optimizer starts.
    #[arg(long, default_value_t = loglindley::mle::DEFAULT_STARTS)]
    starts: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, clap::Args)]
struct DistArgs {
    /// Model name; everything except `pdf` needs `llw`.
    #[arg(long, default_value = "llw")]
    model: String,
    /// Parent distribution of the generated family.
    #[arg(long, default_value = "weibull")]
    baseline: String,
    /// Comma-separated `name=value` list, e.g. `a=2,b=0.5,alpha=1,beta=1.5`.
    #[arg(long)]
    params: String,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit one model by maximum likelihood.
    Fit {
        #[command(flatten)]
        common: FitArgs,
        /// Model name (llw, tw, gw, low, liw, olw, ww, mow, mcw, kw, bw, weibull).
        #[arg(long)]
        model: String,
        /// Parent distribution when fitting `llw` (uniform, normal, weibull).
        #[arg(long, default_value = "weibull")]
        baseline: String,
    },
    /// Fit several models and tabulate information criteria.
    Compare {
        #[command(flatten)]
        common: FitArgs,
        /// `all` or a comma-separated list of model names.
        #[arg(long, default_value = "all")]
        models: String,
    },
    /// Draw a random sample by inverse transform.
    Sample {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(short = 'n', long = "size")]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Quantile at probability `--at`.
    Quantile {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, allow_negative_numbers = true)]
        at: f64,
    },
    /// Cumulative distribution function at `--at`.
    Cdf {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, allow_negative_numbers = true)]
        at: f64,
    },
    /// Density at `--at`; also available for the rival models.
    Pdf {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, allow_negative_numbers = true)]
        at: f64,
    },
    /// Critical points of the density and hazard rate.
    Shape {
        #[command(flatten)]
        dist: DistArgs,
        /// Number of quantile-spaced grid points scanned for sign changes.
        #[arg(long, default_value_t = loglindley::shapes::DEFAULT_GRID)]
        grid: usize,
    },
    /// Raw moments r = 1..4 from the exp-G series.
    Moments {
        #[command(flatten)]
        dist: DistArgs,
        /// Series truncation K (J = K).
        #[arg(long, default_value_t = loglindley::series::DEFAULT_TRUNCATION)]
        kmax: usize,
    },
}

/// A failure with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Data(_) | Error::Parse { .. } => EXIT_DATA,
            Error::Fit(_) | Error::SeriesTail { .. } => EXIT_FIT,
            Error::InvalidParameter { .. } | Error::Domain { .. } | Error::Unknown { .. } => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Fit { common, model, baseline } => commands::fit(&common, &model, &baseline),
        Command::Compare { common, models } => commands::compare(&common, &models),
        Command::Sample { dist, n, seed } => commands::sample(&dist, n, seed),
        Command::Quantile { dist, at } => commands::quantile(&dist, at),
        Command::Cdf { dist, at } => commands::cdf(&dist, at),
        Command::Pdf { dist, at } => commands::pdf(&dist, at),
        Command::Shape { dist, grid } => commands::shape(&dist, grid),
        Command::Moments { dist, kmax } => commands::moments(&dist, kmax),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
