use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ginikit::GiniMethod;

#[derive(Debug, Parser)]
#[command(
    name = "ginikit",
    version,
    about = "Gini coefficients of probability distributions",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one distribution with one method.
    Compute(ComputeArgs),
    /// Negative-binomial Gini over a grid of k values.
    Sweep(SweepArgs),
    /// Recompute the Jakarta-Depok and Batan secondary-case table.
    Table1(Table1Args),
    /// Gini of observed data read from a file.
    Empirical(EmpiricalArgs),
    /// Cross-check every applicable method against every other.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    Poisson,
    Geometric,
    #[value(alias = "negative-binomial", alias = "nb")]
    Negbinom,
    Exponential,
    Pareto,
    Uniform,
}

/// Distribution parameters. Only the ones relevant to `--dist` are read.
#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    #[arg(long, value_enum)]
    pub dist: Option<DistKind>,
    /// Poisson rate.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Success probability (geometric, negative binomial).
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// First support point of the geometric law.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub start: u8,
    /// Negative-binomial shape.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Exponential rate.
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    /// Pareto shape.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Pareto scale.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub x_m: f64,
    /// Uniform lower end.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Uniform upper end.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct NumericArgs {
    /// Target absolute error of quadrature-based results.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Bound on the neglected mass in truncated sums.
    #[arg(long, default_value_t = 1e-12)]
    pub sum_tol: f64,
    /// Half-width of the real-line integration window.
    #[arg(long, default_value_t = 1e3)]
    pub halfwidth: f64,
    /// Term cap for the alternating series.
    #[arg(long, default_value_t = 100_000)]
    pub max_terms: usize,
    /// Number of pairs drawn by the Monte-Carlo method.
    #[arg(long, default_value_t = 1_000_000)]
    pub pairs: usize,
    #[arg(long, env = "GINIKIT_SEED", default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long, default_value = "closed-form")]
    pub method: GiniMethod,
    #[command(flatten)]
    pub numeric: NumericArgs,
    /// Print a JSON object instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// G against k on a log grid from 1e-3 to 1e2.
    Fig1,
    /// Small k, next to the line 1 + c k.
    Fig2,
    /// sqrt(k) G for large k, next to its limit.
    Fig3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Predefined grid. Explicit grid flags override its values.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Success probability; repeat or comma-separate for several panels.
    #[arg(long, value_delimiter = ',', conflicts_with = "lambda")]
    pub p: Vec<f64>,
    /// Gamma rate, as an alternative to `--p`.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    #[arg(long)]
    pub k_min: Option<f64>,
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    #[arg(long, value_delimiter = ',', default_value = "nb-fourier")]
    pub methods: Vec<GiniMethod>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Output file. With several panels, `_p<value>` is added before the extension.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a gnuplot script that plots the output.
    #[arg(long)]
    pub gnuplot: Option<PathBuf>,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Csv,
    Lines,
}

#[derive(Debug, Args)]
pub struct EmpiricalArgs {
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "lines")]
    pub format: InputFormat,
    /// CSV column, by header name or zero-based index.
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long, env = "GINIKIT_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Check a single distribution instead of the default grid.
    #[command(flatten)]
    pub dist: DistArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
    /// Leave the Monte-Carlo oracle out.
    #[arg(long)]
    pub no_monte_carlo: bool,
    /// Negative control: shift this method's values by 1e-3.
    #[arg(long)]
    pub inject_broken: Option<GiniMethod>,
    #[arg(long)]
    pub json: bool,
}
