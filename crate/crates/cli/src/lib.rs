//! Command implementations behind the `ginikit` binary.
//!
//! Every command writes to a caller-supplied writer so it can be exercised
//! from tests without spawning a process.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod sweep;
pub mod table1;
pub mod validate;

use std::fmt;
use std::io::Write;

use ginikit::empirical::{empirical_gini, load_samples, ColumnSelector, SampleFormat};
use ginikit::gini::{gini, GiniOptions};
use ginikit::quadrature::QuadratureSpec;
use ginikit::{DistributionSpec, GiniError, GiniResult, SupportStart};
use serde::Serialize;

use args::{Cli, Command, ComputeArgs, DistArgs, DistKind, EmpiricalArgs, InputFormat, NumericArgs};

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameters (exit 2).
    Usage(String),
    /// A computation or I/O step failed (exit 1).
    Failure(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Failure(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl From<GiniError> for CliError {
    fn from(e: GiniError) -> Self {
        match e {
            GiniError::InvalidParameter { .. } | GiniError::Unsupported { .. } => Self::Usage(e.to_string()),
            other => Self::Failure(other.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Failure(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Failure(e.into())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

fn require(value: Option<f64>, flag: &str, dist: &str) -> CliResult<f64> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --dist {dist}")))
}

impl DistArgs {
    /// Builds the distribution, or `None` when `--dist` was not given.
    pub fn spec(&self) -> CliResult<Option<DistributionSpec>> {
        let Some(kind) = self.dist else {
            return Ok(None);
        };
        let spec = match kind {
            DistKind::Poisson => DistributionSpec::poisson(require(self.lambda, "lambda", "poisson")?)?,
            DistKind::Geometric => {
                let start = if self.start == 1 {
                    SupportStart::One
                } else {
                    SupportStart::Zero
                };
                DistributionSpec::geometric(require(self.p, "p", "geometric")?, start)?
            }
            DistKind::Negbinom => DistributionSpec::negative_binomial(
                require(self.k, "k", "negbinom")?,
                require(self.p, "p", "negbinom")?,
            )?,
            DistKind::Exponential => DistributionSpec::exponential(self.rate.unwrap_or(1.0))?,
            DistKind::Pareto => DistributionSpec::pareto(require(self.alpha, "alpha", "pareto")?, self.x_m)?,
            DistKind::Uniform => {
                DistributionSpec::uniform(require(self.a, "a", "uniform")?, require(self.b, "b", "uniform")?)?
            }
        };
        Ok(Some(spec))
    }
}

impl NumericArgs {
    pub fn options(&self) -> CliResult<GiniOptions> {
        let quadrature = QuadratureSpec {
            target_abs_tol: self.tol,
            truncation_halfwidth: self.halfwidth,
            ..QuadratureSpec::default()
        };
        quadrature.validate()?;
        if !(self.sum_tol > 0.0) {
            return Err(CliError::Usage("--sum-tol must be positive".into()));
        }
        Ok(GiniOptions {
            quadrature,
            sum_tol: self.sum_tol,
            series_max_terms: self.max_terms,
            mc_pairs: self.pairs,
            seed: self.seed,
        })
    }
}

/// Fixed-point formatting with seven decimals.
pub fn fmt7(x: f64) -> String {
    format!("{x:.7}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"))
}

/// JSON shape of a single result.
#[derive(Debug, Serialize)]
pub struct ResultJson {
    pub distribution: String,
    pub method: String,
    pub value: f64,
    pub abs_error_estimate: f64,
    pub imag_residual: Option<f64>,
    pub mc_standard_error: Option<f64>,
    pub truncation_tail_bound: Option<f64>,
    pub clamped: bool,
    pub out_of_domain: bool,
}

impl ResultJson {
    pub fn new(distribution: String, r: &GiniResult) -> Self {
        Self {
            distribution,
            method: r.method.to_string(),
            value: r.value,
            abs_error_estimate: r.abs_error_estimate,
            imag_residual: r.imag_residual,
            mc_standard_error: r.mc_standard_error,
            truncation_tail_bound: r.truncation_tail_bound,
            clamped: r.clamped,
            out_of_domain: r.out_of_domain,
        }
    }
}

pub fn cmd_compute(args: &ComputeArgs, out: &mut dyn Write) -> CliResult {
    let spec = args
        .dist
        .spec()?
        .ok_or_else(|| CliError::Usage("--dist is required".into()))?;
    let opts = args.numeric.options()?;
    let r = gini(&spec, args.method, &opts)?;
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &ResultJson::new(spec.to_string(), &r))?;
        writeln!(out)?;
        return Ok(());
    }
    writeln!(out, "distribution          {spec}")?;
    writeln!(out, "method                {}", r.method)?;
    writeln!(out, "value                 {}", fmt7(r.value))?;
    writeln!(out, "abs_error_estimate    {:.3e}", r.abs_error_estimate)?;
    writeln!(out, "imag_residual         {}", fmt_opt(r.imag_residual))?;
    writeln!(out, "truncation_tail_bound {}", fmt_opt(r.truncation_tail_bound))?;
    writeln!(out, "mc_standard_error     {}", fmt_opt(r.mc_standard_error))?;
    if r.clamped {
        writeln!(out, "note: value clamped into [0, 1]")?;
    }
    if r.out_of_domain {
        writeln!(out, "note: asymptotic value lies outside [0, 1]")?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct EmpiricalJson<'a> {
    source: &'a str,
    n: usize,
    mean: f64,
    gini: f64,
    gini_unbiased: f64,
    bootstrap_standard_error: f64,
}

pub fn cmd_empirical(args: &EmpiricalArgs, out: &mut dyn Write) -> CliResult {
    let format = match args.format {
        InputFormat::Csv => SampleFormat::Csv,
        InputFormat::Lines => SampleFormat::Lines,
    };
    let column = args.column.as_ref().map(|c| match c.parse::<usize>() {
        Ok(i) => ColumnSelector::Index(i),
        Err(_) => ColumnSelector::Name(c.clone()),
    });
    let samples = load_samples(&args.path, format, column.as_ref()).map_err(|e| CliError::Failure(e.into()))?;
    let est = empirical_gini(&samples, args.seed).map_err(|e| CliError::Failure(e.into()))?;
    let se = est.result.mc_standard_error.unwrap_or(0.0);
    if args.json {
        let j = EmpiricalJson {
            source: &samples.source,
            n: est.n,
            mean: est.mean,
            gini: est.result.value,
            gini_unbiased: est.unbiased,
            bootstrap_standard_error: se,
        };
        serde_json::to_writer_pretty(&mut *out, &j)?;
        writeln!(out)?;
        return Ok(());
    }
    writeln!(out, "source                   {}", samples.source)?;
    writeln!(out, "n                        {}", est.n)?;
    writeln!(out, "mean                     {}", fmt7(est.mean))?;
    writeln!(out, "gini (n^2)               {}", fmt7(est.result.value))?;
    writeln!(out, "gini (n(n-1))            {}", fmt7(est.unbiased))?;
    writeln!(out, "bootstrap standard error {}", fmt7(se))?;
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Compute(a) => cmd_compute(a, out),
        Command::Sweep(a) => sweep::cmd_sweep(a, out),
        Command::Table1(a) => table1::cmd_table1(a, out),
        Command::Empirical(a) => cmd_empirical(a, out),
        Command::Validate(a) => validate::cmd_validate(a, out),
    }
}
