//! Gini estimation from observed samples.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::Kahan;
use crate::gini::{std_dev, GiniMethod, GiniResult};
use crate::{GiniError, Result};

pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Nonnegative observations together with where they came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub source: String,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(GiniError::Empty("sample set has no values"));
        }
        if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(GiniError::InvalidParameter {
                name: "sample value",
                value: bad,
                reason: "must be a finite nonnegative number",
            });
        }
        Ok(Self {
            values,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalGini {
    /// Plug-in estimate with denominator `n^2`; the bootstrap standard error
    /// sits in `mc_standard_error`.
    pub result: GiniResult,
    /// The same statistic with denominator `n (n - 1)`.
    pub unbiased: f64,
    pub n: usize,
    pub mean: f64,
}

/// `sum_{i<j} (x_(j) - x_(i))` for sorted data, via `sum_i (2i - n - 1) x_(i)`.
fn pair_difference_sum(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let mut acc = Kahan::default();
    for (i, &x) in sorted.iter().enumerate() {
        acc.add((2.0 * (i as f64 + 1.0) - n - 1.0) * x);
    }
    acc.sum()
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Plug-in Gini `sum_i sum_j |x_i - x_j| / (2 n^2 mean)` in `O(n log n)`.
pub fn gini_sorted(values: &[f64]) -> Result<f64> {
    let s = sorted(values);
    let n = s.len() as f64;
    let total: f64 = s.iter().sum();
    if !(total > 0.0) {
        return Err(GiniError::Domain("sample mean is zero".into()));
    }
    // 2 sum_{i<j} / (2 n^2 mean) = sum_{i<j} / (n total)
    Ok(pair_difference_sum(&s) / (n * total))
}

/// The same statistic as [`gini_sorted`] by the direct double loop.
pub fn gini_naive(values: &[f64]) -> Result<f64> {
    let n = values.len() as f64;
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Err(GiniError::Domain("sample mean is zero".into()));
    }
    let mut acc = Kahan::default();
    for &a in values {
        for &b in values {
            acc.add((a - b).abs());
        }
    }
    Ok(acc.sum() / (2.0 * n * total))
}

/// Plug-in Gini of the sorted sample reweighted by multiplicities `w`.
fn weighted_gini(sorted: &[f64], w: &[u32]) -> f64 {
    let mut below_weight = 0.0;
    let mut below_sum = 0.0;
    let mut pairs = Kahan::default();
    let mut n = 0.0;
    let mut total = 0.0;
    for (&x, &c) in sorted.iter().zip(w) {
        if c == 0 {
            continue;
        }
        let c = c as f64;
        pairs.add(c * (x * below_weight - below_sum));
        below_weight += c;
        below_sum += c * x;
        n += c;
        total += c * x;
    }
    pairs.sum() / (n * total)
}

/// Estimates `G` with a bootstrap standard error from `BOOTSTRAP_RESAMPLES`
/// resamples. Resample `r` uses ChaCha stream `r` of `seed`.
pub fn empirical_gini(s: &SampleSet, seed: u64) -> Result<EmpiricalGini> {
    if s.is_empty() {
        return Err(GiniError::Empty("sample set has no values"));
    }
    let sorted = sorted(&s.values);
    let n = sorted.len();
    let total: f64 = sorted.iter().sum();
    if !(total > 0.0) {
        return Err(GiniError::Domain(format!("sample mean of {} is zero", s.source)));
    }
    let g = pair_difference_sum(&sorted) / (n as f64 * total);
    let boot: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let mut counts = vec![0u32; n];
            for _ in 0..n {
                counts[rng.random_range(0..n)] += 1;
            }
            weighted_gini(&sorted, &counts)
        })
        .collect();
    let se = if n > 1 { std_dev(&boot) } else { 0.0 };
    let unbiased = if n > 1 { g * n as f64 / (n as f64 - 1.0) } else { 0.0 };
    let mut result = GiniResult::new(g, GiniMethod::Empirical, se);
    result.mc_standard_error = Some(se);
    Ok(EmpiricalGini {
        result,
        unbiased,
        n,
        mean: total / n as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    /// Comma-separated with a header row.
    Csv,
    /// One number per line; blank lines and `#` comments are skipped.
    Lines,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    /// Zero-based.
    Index(usize),
}

fn parse_value(path: &Path, line: usize, field: &str) -> Result<f64> {
    let err = |message: String| GiniError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| err(format!("cannot parse {:?} as a number", field.trim())))?;
    if v.is_nan() || v.is_infinite() {
        return Err(err(format!("{v} is not a finite number")));
    }
    if v < 0.0 {
        return Err(err(format!("negative value {v}")));
    }
    Ok(v)
}

/// Reads observations from `path`. Malformed or negative entries are
/// rejected with their line number.
pub fn load_samples(path: &Path, format: SampleFormat, column: Option<&ColumnSelector>) -> Result<SampleSet> {
    let io = |source| GiniError::Io {
        path: path.to_path_buf(),
        source,
    };
    let text = fs::read_to_string(path).map_err(io)?;
    let values = match format {
        SampleFormat::Lines => {
            let mut out = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                out.push(parse_value(path, i + 1, t)?);
            }
            out
        }
        SampleFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(true)
                .trim(csv::Trim::All)
                .from_reader(text.as_bytes());
            let parse_err = |line: usize, message: String| GiniError::Parse {
                path: path.to_path_buf(),
                line,
                message,
            };
            let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
            let idx = match column {
                None => 0,
                Some(ColumnSelector::Index(i)) => *i,
                Some(ColumnSelector::Name(name)) => headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| parse_err(1, format!("no column named {name:?}")))?,
            };
            if idx >= headers.len() {
                return Err(parse_err(
                    1,
                    format!("column {idx} out of range ({} columns)", headers.len()),
                ));
            }
            let mut out = Vec::new();
            for rec in rdr.records() {
                let rec = rec.map_err(|e| {
                    let line = e.position().map_or(0, |p| p.line() as usize);
                    parse_err(line, e.to_string())
                })?;
                let line = rec.position().map_or(0, |p| p.line() as usize);
                let field = rec
                    .get(idx)
                    .ok_or_else(|| parse_err(line, format!("missing column {idx}")))?;
                out.push(parse_value(path, line, field)?);
            }
            out
        }
    };
    if values.is_empty() {
        return Err(GiniError::Empty("no parseable values in input"));
    }
    SampleSet::new(values, path.display().to_string())
}
