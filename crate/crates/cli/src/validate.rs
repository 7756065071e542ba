//! Cross-method agreement report.

use std::collections::BTreeMap;
use std::io::Write;

use ginikit::gini::{applicable_methods, gini, GiniOptions};
use ginikit::{DistributionSpec, GiniMethod, SupportStart};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::ValidateArgs;
use crate::{fmt7, CliError, CliResult};

/// Extra slack allowed between two deterministic methods.
pub const AGREEMENT_SLACK: f64 = 1e-6;
/// Shift applied by `--inject-broken`.
pub const BROKEN_SHIFT: f64 = 1e-3;

pub fn default_grid() -> Vec<DistributionSpec> {
    let mut specs = Vec::new();
    for p in [0.1, 0.5, 0.9] {
        specs.push(DistributionSpec::geometric(p, SupportStart::Zero).unwrap());
        specs.push(DistributionSpec::geometric(p, SupportStart::One).unwrap());
    }
    for lambda in [0.5, 1.0, 5.0] {
        specs.push(DistributionSpec::poisson(lambda).unwrap());
    }
    for k in [0.06, 0.5, 1.0, 2.0, 10.0] {
        for p in [0.1, 0.5, 0.9] {
            specs.push(DistributionSpec::negative_binomial(k, p).unwrap());
        }
    }
    specs.push(DistributionSpec::exponential(1.0).unwrap());
    specs.push(DistributionSpec::uniform(0.0, 1.0).unwrap());
    for alpha in [1.5, 2.0, 3.0] {
        specs.push(DistributionSpec::pareto(alpha, 1.0).unwrap());
    }
    specs
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodOutcome {
    pub method: GiniMethod,
    pub value: Option<f64>,
    /// Half-width used in comparisons: the error estimate, or three
    /// standard errors for Monte-Carlo.
    pub tolerance: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Disagreement {
    pub a: GiniMethod,
    pub b: GiniMethod,
    pub deviation: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub distribution: String,
    pub outcomes: Vec<MethodOutcome>,
    pub max_deviation: f64,
    pub disagreements: Vec<Disagreement>,
}

impl PointReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.outcomes.iter().all(|o| o.error.is_none())
    }

    /// Methods that take part in the largest number of failures.
    pub fn suspects(&self) -> Vec<GiniMethod> {
        let mut count: BTreeMap<&'static str, (GiniMethod, usize)> = BTreeMap::new();
        for d in &self.disagreements {
            for m in [d.a, d.b] {
                count.entry(m.name()).or_insert((m, 0)).1 += 1;
            }
        }
        for o in &self.outcomes {
            if o.error.is_some() {
                count.entry(o.method.name()).or_insert((o.method, 0)).1 += usize::MAX / 2;
            }
        }
        let top = count.values().map(|v| v.1).max().unwrap_or(0);
        count.values().filter(|v| v.1 == top && top > 0).map(|v| v.0).collect()
    }
}

pub fn validate_spec(
    spec: &DistributionSpec,
    opts: &GiniOptions,
    monte_carlo: bool,
    broken: Option<GiniMethod>,
) -> PointReport {
    let outcomes: Vec<MethodOutcome> = applicable_methods(spec)
        .into_iter()
        .filter(|m| monte_carlo || *m != GiniMethod::MonteCarlo)
        .map(|m| match gini(spec, m, opts) {
            Ok(r) => {
                let shift = if broken == Some(m) { BROKEN_SHIFT } else { 0.0 };
                MethodOutcome {
                    method: m,
                    value: Some(r.value + shift),
                    tolerance: Some(r.tolerance()),
                    error: None,
                }
            }
            Err(e) => MethodOutcome {
                method: m,
                value: None,
                tolerance: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let mut disagreements = Vec::new();
    let mut max_deviation = 0.0f64;
    for (i, a) in outcomes.iter().enumerate() {
        for b in &outcomes[i + 1..] {
            let (Some(va), Some(vb)) = (a.value, b.value) else {
                continue;
            };
            let mc = a.method == GiniMethod::MonteCarlo || b.method == GiniMethod::MonteCarlo;
            let allowed =
                a.tolerance.unwrap_or(0.0) + b.tolerance.unwrap_or(0.0) + if mc { 0.0 } else { AGREEMENT_SLACK };
            let deviation = (va - vb).abs();
            if !mc {
                max_deviation = max_deviation.max(deviation);
            }
            if !(deviation <= allowed) {
                disagreements.push(Disagreement {
                    a: a.method,
                    b: b.method,
                    deviation,
                    allowed,
                });
            }
        }
    }
    PointReport {
        distribution: spec.to_string(),
        outcomes,
        max_deviation,
        disagreements,
    }
}

/// Runs the agreement check on every spec; reports come back in input order.
pub fn validate_all(
    specs: &[DistributionSpec],
    opts: &GiniOptions,
    monte_carlo: bool,
    broken: Option<GiniMethod>,
) -> Vec<PointReport> {
    specs
        .par_iter()
        .map(|s| validate_spec(s, opts, monte_carlo, broken))
        .collect()
}

pub fn write_report(reports: &[PointReport], out: &mut dyn Write) -> CliResult {
    for r in reports {
        writeln!(out, "{}", r.distribution)?;
        for o in &r.outcomes {
            match (o.value, &o.error) {
                (Some(v), _) => writeln!(
                    out,
                    "  {:<22} {}  +- {:.2e}",
                    o.method.name(),
                    fmt7(v),
                    o.tolerance.unwrap_or(0.0)
                )?,
                (None, Some(e)) => writeln!(out, "  {:<22} error: {e}", o.method.name())?,
                (None, None) => {}
            }
        }
        let status = if r.passed() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "  max |diff| between exact methods {:.2e}  {status}",
            r.max_deviation
        )?;
        for d in &r.disagreements {
            writeln!(
                out,
                "  disagreement: {} vs {}: {:.3e} > {:.3e}",
                d.a, d.b, d.deviation, d.allowed
            )?;
        }
    }
    Ok(())
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> CliResult {
    let opts = args.numeric.options()?;
    let specs = match args.dist.spec()? {
        Some(s) => vec![s],
        None => default_grid(),
    };
    let reports = validate_all(&specs, &opts, !args.no_monte_carlo, args.inject_broken);
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &reports)?;
        writeln!(out)?;
    } else {
        write_report(&reports, out)?;
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    if failed.is_empty() {
        if !args.json {
            writeln!(out, "all {} distributions agree across methods", reports.len())?;
        }
        return Ok(());
    }
    let listing: Vec<String> = failed
        .iter()
        .map(|r| {
            let s: Vec<_> = r.suspects().iter().map(|m| m.to_string()).collect();
            format!("{} (suspect: {})", r.distribution, s.join(", "))
        })
        .collect();
    Err(CliError::Failure(anyhow::anyhow!(
        "{} of {} distributions disagree: {}",
        failed.len(),
        reports.len(),
        listing.join("; ")
    )))
}
