//! Negative-binomial Gini along a grid of `k`, for regenerating the figures.
//!
//! CSV columns, in order: `k`, one column per requested method (named after
//! the method), `one_plus_ck`, `sqrt_k_times_g`, `large_k_limit`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ginikit::asymptotics::{lambda_from_p, AsymptoticConstants};
use ginikit::gini::{gini, nb_series_min_p, GiniOptions};
use ginikit::{DistributionSpec, GiniMethod};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{OutputFormat, Preset, Spacing, SweepArgs};
use crate::{CliError, CliResult};

const NB_METHODS: [GiniMethod; 9] = [
    GiniMethod::NbFourier,
    GiniMethod::NbSeries,
    GiniMethod::FourierDiscrete,
    GiniMethod::FourierDiscreteAlt,
    GiniMethod::ExcessSum,
    GiniMethod::ClassicPairwise,
    GiniMethod::MonteCarlo,
    GiniMethod::AsymptoticSmallK,
    GiniMethod::AsymptoticLargeK,
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub p: f64,
    pub k_grid: Vec<f64>,
    pub methods: Vec<GiniMethod>,
    pub output_format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: f64,
    /// One value per method, in the order of [`SweepSpec::methods`].
    pub values: Vec<f64>,
    pub one_plus_ck: f64,
    /// Uses the `nb-fourier` column when present, otherwise the first one.
    pub sqrt_k_times_g: f64,
    pub large_k_limit: f64,
}

#[derive(Debug, Serialize)]
struct SweepJson<'a> {
    p: f64,
    lambda: f64,
    small_k_slope_c: f64,
    methods: Vec<String>,
    rows: &'a [SweepRow],
}

impl SweepSpec {
    pub fn new(p: f64, k_grid: Vec<f64>, methods: Vec<GiniMethod>, output_format: OutputFormat) -> CliResult<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(CliError::Usage(format!("p = {p} must lie strictly between 0 and 1")));
        }
        if k_grid.is_empty() {
            return Err(CliError::Usage("the k grid is empty".into()));
        }
        if let Some(k) = k_grid.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
            return Err(CliError::Usage(format!("grid value k = {k} is not positive")));
        }
        if methods.is_empty() {
            return Err(CliError::Usage("no methods requested".into()));
        }
        for m in &methods {
            if !NB_METHODS.contains(m) {
                return Err(CliError::Usage(format!(
                    "method {m} does not apply to the negative binomial"
                )));
            }
            if *m == GiniMethod::NbSeries && p <= nb_series_min_p() {
                return Err(CliError::Usage(format!(
                    "nb-series needs p > {:.6}, got {p}",
                    nb_series_min_p()
                )));
            }
        }
        Ok(Self {
            p,
            k_grid,
            methods,
            output_format,
        })
    }

    pub fn lambda(&self) -> f64 {
        lambda_from_p(self.p)
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["k".to_string()];
        h.extend(self.methods.iter().map(|m| m.to_string()));
        h.extend(["one_plus_ck", "sqrt_k_times_g", "large_k_limit"].map(String::from));
        h
    }
}

pub fn grid(k_min: f64, k_max: f64, points: usize, spacing: Spacing) -> CliResult<Vec<f64>> {
    if !(k_min > 0.0 && k_max >= k_min) {
        return Err(CliError::Usage(format!(
            "need 0 < k-min <= k-max, got {k_min} and {k_max}"
        )));
    }
    if points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    if points == 1 {
        return Ok(vec![k_min]);
    }
    let step = |i: usize| i as f64 / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match spacing {
            Spacing::Linear => k_min + (k_max - k_min) * step(i),
            Spacing::Log => (k_min.ln() + (k_max.ln() - k_min.ln()) * step(i)).exp(),
        })
        .collect())
}

/// `(k_min, k_max, points, spacing)` of each figure.
pub fn preset_grid(preset: Preset) -> (f64, f64, usize, Spacing) {
    match preset {
        Preset::Fig1 => (1e-3, 1e2, 50, Spacing::Log),
        Preset::Fig2 => (1e-4, 1e-1, 40, Spacing::Log),
        Preset::Fig3 => (1e1, 1e4, 40, Spacing::Log),
    }
}

pub fn compute_sweep(spec: &SweepSpec, opts: &GiniOptions) -> CliResult<Vec<SweepRow>> {
    let consts = AsymptoticConstants::from_p(spec.p)?;
    let reference = spec
        .methods
        .iter()
        .position(|m| *m == GiniMethod::NbFourier)
        .unwrap_or(0);
    spec.k_grid
        .par_iter()
        .map(|&k| {
            let dist = DistributionSpec::negative_binomial(k, spec.p)?;
            let values = spec
                .methods
                .iter()
                .map(|&m| gini(&dist, m, opts).map(|r| r.value))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SweepRow {
                k,
                one_plus_ck: 1.0 + consts.small_k_slope_c * k,
                sqrt_k_times_g: k.sqrt() * values[reference],
                large_k_limit: consts.large_k_limit,
                values,
            })
        })
        .collect::<Result<Vec<_>, ginikit::GiniError>>()
        .map_err(CliError::from)
}

fn num(x: f64) -> String {
    crate::fmt7(x)
}

pub fn write_csv(spec: &SweepSpec, rows: &[SweepRow], out: &mut dyn Write) -> CliResult {
    writeln!(out, "{}", spec.header().join(","))?;
    for r in rows {
        let mut cells = vec![format!("{}", r.k)];
        cells.extend(r.values.iter().map(|&v| num(v)));
        cells.extend([num(r.one_plus_ck), num(r.sqrt_k_times_g), num(r.large_k_limit)]);
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn write_json(spec: &SweepSpec, rows: &[SweepRow], out: &mut dyn Write) -> CliResult {
    let doc = SweepJson {
        p: spec.p,
        lambda: spec.lambda(),
        small_k_slope_c: AsymptoticConstants::from_p(spec.p)?.small_k_slope_c,
        methods: spec.methods.iter().map(|m| m.to_string()).collect(),
        rows,
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

/// Gnuplot script that draws the CSV file at `data`.
pub fn gnuplot_script(spec: &SweepSpec, data: &Path, preset: Option<Preset>) -> String {
    let n = spec.methods.len();
    let col = |name: &str| spec.header().iter().position(|h| h == name).map_or(0, |i| i + 1);
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key autotitle columnhead\n");
    s.push_str(&format!(
        "set title 'Negative binomial, p = {}'\nset xlabel 'k'\n",
        spec.p
    ));
    let file = data.display();
    match preset {
        Some(Preset::Fig3) => {
            s.push_str("set logscale x\nset ylabel 'sqrt(k) G'\n");
            s.push_str(&format!(
                "plot '{file}' using 1:{} with linespoints, '' using 1:{} with lines\n",
                col("sqrt_k_times_g"),
                col("large_k_limit")
            ));
        }
        Some(Preset::Fig2) => {
            s.push_str("set ylabel 'G'\n");
            s.push_str(&format!(
                "plot '{file}' using 1:2 with linespoints, '' using 1:{} with lines\n",
                col("one_plus_ck")
            ));
        }
        _ => {
            s.push_str("set logscale x\nset ylabel 'G'\nplot ");
            let series: Vec<String> = (0..n)
                .map(|i| format!("'{file}' using 1:{} with linespoints", i + 2))
                .collect();
            s.push_str(&series.join(", "));
            s.push('\n');
        }
    }
    s
}

/// `path` with `_p<p>` inserted before the extension.
pub fn panel_path(path: &Path, p: f64) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_p{p}.{}", ext.to_string_lossy()),
        None => format!("{stem}_p{p}"),
    };
    path.with_file_name(name)
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> CliResult {
    let opts = args.numeric.options()?;
    let (mut k_min, mut k_max, mut points, mut spacing) = (None, None, None, None);
    if let Some(preset) = args.preset {
        let (a, b, n, s) = preset_grid(preset);
        (k_min, k_max, points, spacing) = (Some(a), Some(b), Some(n), Some(s));
    }
    let k_min = args
        .k_min
        .or(k_min)
        .ok_or_else(|| CliError::Usage("--k-min or --preset is required".into()))?;
    let k_max = args
        .k_max
        .or(k_max)
        .ok_or_else(|| CliError::Usage("--k-max or --preset is required".into()))?;
    let points = args.points.or(points).unwrap_or(50);
    let spacing = args.spacing.or(spacing).unwrap_or(Spacing::Log);
    let k_grid = grid(k_min, k_max, points, spacing)?;

    let mut ps: Vec<f64> = args.p.clone();
    ps.extend(args.lambda.iter().map(|&l| l / (l + 1.0)));
    if ps.is_empty() {
        if args.preset.is_some() {
            ps = vec![0.9, 0.5, 0.1];
        } else {
            return Err(CliError::Usage("--p or --lambda is required without --preset".into()));
        }
    }
    let several = ps.len() > 1;
    for p in ps {
        let spec = SweepSpec::new(p, k_grid.clone(), args.methods.clone(), args.format)?;
        let rows = compute_sweep(&spec, &opts)?;
        let path = if several {
            panel_path(&args.out, p)
        } else {
            args.out.clone()
        };
        let mut buf = Vec::new();
        match spec.output_format {
            OutputFormat::Csv => write_csv(&spec, &rows, &mut buf)?,
            OutputFormat::Json => write_json(&spec, &rows, &mut buf)?,
        }
        fs::write(&path, buf).map_err(|e| CliError::Failure(anyhow::anyhow!("writing {}: {e}", path.display())))?;
        writeln!(out, "wrote {} ({} rows, p = {p})", path.display(), rows.len())?;
        if let Some(g) = &args.gnuplot {
            let gpath = if several { panel_path(g, p) } else { g.clone() };
            fs::write(&gpath, gnuplot_script(&spec, &path, args.preset))
                .map_err(|e| CliError::Failure(anyhow::anyhow!("writing {}: {e}", gpath.display())))?;
            writeln!(out, "wrote {}", gpath.display())?;
        }
    }
    Ok(())
}
