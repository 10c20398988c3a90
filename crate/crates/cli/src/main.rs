//! `upsilon`: Upsilon distribution functions and Sharpe ratio inference from
//! the command line.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 numerical or domain
//! failure.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use upsilon::Sided;

use crate::input::{parse_count_list, parse_list};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Compute(upsilon::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Compute(upsilon::Error::Config(_)) => 2,
            CliError::Compute(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Input(m) => write!(f, "input: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<upsilon::Error> for CliError {
    fn from(e: upsilon::Error) -> Self {
        CliError::Compute(e)
    }
}

/// A comma-separated list of reals.
#[derive(Debug, Clone, Default)]
pub struct List(pub Vec<f64>);

/// A comma-separated list of counts.
#[derive(Debug, Clone, Default)]
pub struct Counts(pub Vec<usize>);

fn list(s: &str) -> Result<List, String> {
    parse_list(s).map(List)
}

fn counts(s: &str) -> Result<Counts, String> {
    parse_count_list(s).map(Counts)
}

#[derive(Parser, Debug)]
#[command(name = "upsilon", version, about = "Upsilon distribution and Sharpe ratio inference")]
pub struct Cli {
    /// Print a JSON report instead of text
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Distribution functions of Σ t_j·√(χ²_j/ν_j) + Z
    Dist {
        #[command(subcommand)]
        func: DistCommand,
    },
    /// Tests on Sharpe ratios
    Test {
        #[command(subcommand)]
        kind: TestCommand,
    },
    /// Confidence interval on the signal-noise ratio
    Ci(CiArgs),
    /// Prediction interval for the Sharpe ratio of a future sample
    Predint(PredintArgs),
    /// Conjugate Bayesian updates and intervals
    Bayes {
        #[command(subcommand)]
        op: BayesCommand,
    },
    /// Run a coverage or size experiment from a plan file
    Simulate(SimulateArgs),
    /// Print the text summary of a saved JSON report (file or stdin)
    Render { file: Option<PathBuf> },
}

#[derive(Args, Debug, Clone)]
pub struct LawArgs {
    /// Coefficients t_j, comma separated ('' for none)
    #[arg(long, value_parser = list, allow_hyphen_values = true, default_value = "")]
    pub coef: List,
    /// Degrees of freedom ν_j, comma separated ('' for none)
    #[arg(long, value_parser = list, allow_hyphen_values = true, default_value = "")]
    pub df: List,
}

#[derive(Args, Debug, Clone)]
pub struct OrderArgs {
    /// Series terms for both the Edgeworth and Cornish-Fisher expansions
    #[arg(long)]
    pub terms: Option<usize>,
    /// Edgeworth terms (overrides --terms)
    #[arg(long)]
    pub edgeworth_terms: Option<usize>,
    /// Cornish-Fisher terms (overrides --terms)
    #[arg(long)]
    pub cf_terms: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum DistCommand {
    /// Edgeworth distribution function
    Cdf {
        #[command(flatten)]
        law: LawArgs,
        #[command(flatten)]
        order: OrderArgs,
        /// Evaluation points
        #[arg(long, value_parser = list, allow_hyphen_values = true)]
        x: List,
    },
    /// Edgeworth density
    Pdf {
        #[command(flatten)]
        law: LawArgs,
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long, value_parser = list, allow_hyphen_values = true)]
        x: List,
    },
    /// Cornish-Fisher quantiles, optionally refined by inverting the CDF
    Quantile {
        #[command(flatten)]
        law: LawArgs,
        #[command(flatten)]
        order: OrderArgs,
        /// Probabilities
        #[arg(long, value_parser = list)]
        p: List,
        /// Invert the Edgeworth CDF by bisection
        #[arg(long)]
        refine: bool,
    },
    /// Cumulants κ_1..κ_r
    Cumulants {
        #[command(flatten)]
        law: LawArgs,
        /// Highest cumulant order
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// Exact random draws
    Sample {
        #[command(flatten)]
        law: LawArgs,
        /// Number of draws
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Random seed
        #[arg(long, env = "UPSILON_SEED")]
        seed: Option<u64>,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct CsvArgs {
    /// Returns file (comma separated; header and date column auto-detected)
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Return columns by name or 0-based numeric-column index
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    /// Factor columns; an intercept is always added
    #[arg(long, value_delimiter = ',')]
    pub factors: Vec<String>,
    /// Per-period risk-free rate, in decimal units
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub rfr: f64,
    /// File returns are quoted in percent; divide by 100
    #[arg(long)]
    pub percent: bool,
    /// First row is a header
    #[arg(long, conflicts_with = "no_header")]
    pub header: bool,
    /// First row is data
    #[arg(long)]
    pub no_header: bool,
    /// 0-based column holding dates
    #[arg(long, conflicts_with = "no_date")]
    pub date_column: Option<usize>,
    /// Do not look for a date column
    #[arg(long)]
    pub no_date: bool,
}

#[derive(Args, Debug, Clone)]
pub struct HypArgs {
    /// Contrast weights a_i (default 1 for one sample, 1,-1 for two)
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    pub weights: Option<List>,
    /// Hypothesised value b of Σ a_i ζ_i
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub target: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Alternative: upper, lower or two
    #[arg(long, default_value = "upper")]
    pub sided: Sided,
}

#[derive(Subcommand, Debug)]
pub enum TestCommand {
    /// H0: ζ = target
    One {
        #[command(flatten)]
        csv: CsvArgs,
        /// Sample Sharpe ratio (summary mode)
        #[arg(long, allow_hyphen_values = true)]
        sr: Option<f64>,
        /// Sample size (summary mode)
        #[arg(long)]
        n: Option<usize>,
        /// Hypothesised signal-noise ratio ζ0
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        target: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value = "upper")]
        sided: Sided,
        #[command(flatten)]
        order: OrderArgs,
    },
    /// H0: Σ a_i ζ_i = b over independent samples
    Ksample {
        #[command(flatten)]
        csv: CsvArgs,
        /// Sample Sharpe ratios (summary mode)
        #[arg(long, value_parser = list, allow_hyphen_values = true)]
        sr: Option<List>,
        /// Sample sizes (summary mode)
        #[arg(long, value_parser = counts)]
        n: Option<Counts>,
        #[command(flatten)]
        hyp: HypArgs,
        #[command(flatten)]
        order: OrderArgs,
    },
    /// H0: Σ a_i ζ_g,i = b on factor-model Sharpe ratios
    Factor {
        #[command(flatten)]
        csv: CsvArgs,
        /// Factor-model Sharpe ratios (summary mode)
        #[arg(long, value_parser = list, allow_hyphen_values = true)]
        sr: Option<List>,
        /// Sample sizes (summary mode)
        #[arg(long, value_parser = counts)]
        n: Option<Counts>,
        /// Gram scalars vᵀ(FᵀF)⁻¹v (summary mode)
        #[arg(long, value_parser = list)]
        gram: Option<List>,
        /// Regressor counts including the intercept (summary mode)
        #[arg(long, value_parser = counts)]
        p_count: Option<Counts>,
        /// Direction v over (intercept, factors...); default the intercept
        #[arg(long, value_parser = list, allow_hyphen_values = true)]
        direction: Option<List>,
        #[command(flatten)]
        hyp: HypArgs,
        #[command(flatten)]
        order: OrderArgs,
    },
}

#[derive(Args, Debug)]
pub struct CiArgs {
    #[command(flatten)]
    pub csv: CsvArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub sr: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Gram scalar (summary mode, factor model)
    #[arg(long)]
    pub gram: Option<f64>,
    /// Regressor count including the intercept (summary mode, factor model)
    #[arg(long)]
    pub p_count: Option<usize>,
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    pub direction: Option<List>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub order: OrderArgs,
}

#[derive(Args, Debug)]
pub struct PredintArgs {
    #[command(flatten)]
    pub csv: CsvArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub sr: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Future sample size
    #[arg(long)]
    pub n2: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub order: OrderArgs,
}

#[derive(Args, Debug, Clone)]
pub struct PriorArgs {
    /// Prior location μ0
    #[arg(long, allow_hyphen_values = true)]
    pub mu0: Option<f64>,
    /// Prior location pseudo-count n0
    #[arg(long)]
    pub n0: Option<f64>,
    /// Prior scale σ0²
    #[arg(long)]
    pub sigsq0: Option<f64>,
    /// Prior variance degrees of freedom m0
    #[arg(long)]
    pub m0: Option<f64>,
    /// Hyperparameter file (keys mu, n, sigsq, m; or beta, lambda, sigsq, m)
    #[arg(long, conflicts_with_all = ["mu0", "n0", "sigsq0", "m0"])]
    pub prior: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BayesData {
    #[command(flatten)]
    pub csv: CsvArgs,
    /// Sample mean of excess returns (summary mode)
    #[arg(long, allow_hyphen_values = true, conflicts_with = "sr")]
    pub mean: Option<f64>,
    /// Sample Sharpe ratio, with --sd (summary mode)
    #[arg(long, allow_hyphen_values = true)]
    pub sr: Option<f64>,
    /// Sample standard deviation (summary mode)
    #[arg(long)]
    pub sd: Option<f64>,
    /// Sample size (summary mode)
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum BayesCommand {
    /// Posterior hyperparameters
    Update {
        #[command(flatten)]
        prior: PriorArgs,
        #[command(flatten)]
        data: BayesData,
        /// Write the posterior as a hyperparameter file
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Equal-tailed credible interval on the signal-noise ratio
    Credint {
        #[command(flatten)]
        prior: PriorArgs,
        #[command(flatten)]
        data: BayesData,
        /// Direction v for regression posteriors; default the intercept
        #[arg(long, value_parser = list, allow_hyphen_values = true)]
        direction: Option<List>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[command(flatten)]
        order: OrderArgs,
    },
    /// Posterior predictive interval for a future Sharpe ratio
    Predint {
        #[command(flatten)]
        prior: PriorArgs,
        #[command(flatten)]
        data: BayesData,
        #[arg(long)]
        n2: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[command(flatten)]
        order: OrderArgs,
    },
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Plan file (key = value)
    #[arg(long)]
    pub plan: PathBuf,
    /// Procedure to run (overrides the plan)
    #[arg(long)]
    pub procedure: Option<String>,
    /// Seed (overrides the plan, then UPSILON_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replications (overrides the plan)
    #[arg(long)]
    pub replications: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
