//! Gini coefficient evaluators.
//!
//! Each function is an independent route to `G(X)`. They share only the
//! distribution primitives, so agreement between them is a meaningful check.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics;
use crate::complex::{cis_minus_one, expm1, ln_1p, one_minus_cos, I};
use crate::distributions::Kahan;
use crate::quadrature::{integrate_periodic, integrate_segments, line_segments, QuadratureSpec};
use crate::{DistributionSpec, GiniError, Result, SupportStart};

/// Largest accepted `|Im|` of a Fourier result, on the scale of `G`.
pub const IMAG_RESIDUAL_THRESHOLD: f64 = 1e-6;

/// Smallest `p` for which the alternating negative-binomial series converges.
pub fn nb_series_min_p() -> f64 {
    2.0 * (2f64.sqrt() - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GiniMethod {
    ClosedForm,
    ExcessSum,
    /// Circle integral with the product `p(theta) p(-theta)`.
    FourierDiscrete,
    /// Circle integral written with the squared magnitude `|p(theta)|^2`.
    FourierDiscreteAlt,
    FourierContinuous,
    NbFourier,
    NbSeries,
    ClassicPairwise,
    MonteCarlo,
    AsymptoticSmallK,
    AsymptoticLargeK,
    /// Plug-in estimate from an observed sample.
    Empirical,
}

impl GiniMethod {
    pub const ALL: [GiniMethod; 12] = [
        Self::ClosedForm,
        Self::ExcessSum,
        Self::FourierDiscrete,
        Self::FourierDiscreteAlt,
        Self::FourierContinuous,
        Self::NbFourier,
        Self::NbSeries,
        Self::ClassicPairwise,
        Self::MonteCarlo,
        Self::AsymptoticSmallK,
        Self::AsymptoticLargeK,
        Self::Empirical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ClosedForm => "closed-form",
            Self::ExcessSum => "excess-sum",
            Self::FourierDiscrete => "fourier-discrete",
            Self::FourierDiscreteAlt => "fourier-discrete-alt",
            Self::FourierContinuous => "fourier-continuous",
            Self::NbFourier => "nb-fourier",
            Self::NbSeries => "nb-series",
            Self::ClassicPairwise => "classic-pairwise",
            Self::MonteCarlo => "monte-carlo",
            Self::AsymptoticSmallK => "asymptotic-small-k",
            Self::AsymptoticLargeK => "asymptotic-large-k",
            Self::Empirical => "empirical",
        }
    }

    /// Asymptotic formulas approximate `G`; they are not expected to agree
    /// with the exact representations at finite `k`.
    pub fn is_exact(self) -> bool {
        !matches!(
            self,
            Self::AsymptoticSmallK | Self::AsymptoticLargeK | Self::MonteCarlo | Self::Empirical
        )
    }
}

impl fmt::Display for GiniMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GiniMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL.iter().copied().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|m| m.name()).collect();
            format!("unknown method {s:?}; expected one of {}", names.join(", "))
        })
    }
}

/// How the circle-integral numerator is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FourierVariant {
    /// `(1 - p(theta) - E (e^{-i theta} - 1)) p(-theta)`.
    Product,
    /// `(1 - E (e^{-i theta} - 1)) p(-theta) - |p(theta)|^2`.
    #[default]
    SquaredMagnitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GiniResult {
    pub value: f64,
    pub method: GiniMethod,
    pub abs_error_estimate: f64,
    pub imag_residual: Option<f64>,
    pub truncation_tail_bound: Option<f64>,
    pub mc_standard_error: Option<f64>,
    /// The raw value fell outside `[0, 1]` by less than its error and was clamped.
    pub clamped: bool,
    /// Asymptotic value outside `[0, 1]`, reported as is.
    pub out_of_domain: bool,
}

impl GiniResult {
    pub(crate) fn new(value: f64, method: GiniMethod, abs_error_estimate: f64) -> Self {
        Self {
            value,
            method,
            abs_error_estimate,
            imag_residual: None,
            truncation_tail_bound: None,
            mc_standard_error: None,
            clamped: false,
            out_of_domain: false,
        }
    }

    /// Half-width used when comparing this result with another one.
    pub fn tolerance(&self) -> f64 {
        match self.mc_standard_error {
            Some(se) => 3.0 * se,
            None => self.abs_error_estimate,
        }
    }

    /// Rejects large imaginary residuals and clamps marginal excursions
    /// outside `[0, 1]`.
    pub(crate) fn finalize(mut self) -> Result<Self> {
        if let Some(residual) = self.imag_residual {
            if !(residual < IMAG_RESIDUAL_THRESHOLD) {
                return Err(GiniError::ImaginaryResidual {
                    value: self.value,
                    residual,
                    threshold: IMAG_RESIDUAL_THRESHOLD,
                });
            }
        }
        if !self.value.is_finite() {
            return Err(GiniError::NonConvergence {
                what: "Gini evaluation",
                last_estimate: self.value,
                error_estimate: self.abs_error_estimate,
            });
        }
        let slack = self.tolerance();
        let excess = if self.value < 0.0 {
            -self.value
        } else if self.value > 1.0 {
            self.value - 1.0
        } else {
            return Ok(self);
        };
        if excess <= slack {
            self.value = self.value.clamp(0.0, 1.0);
            self.clamped = true;
            Ok(self)
        } else {
            Err(GiniError::OutOfRange {
                value: self.value,
                error_estimate: slack,
            })
        }
    }
}

/// Knobs shared by all evaluators; used by [`gini`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiniOptions {
    pub quadrature: QuadratureSpec,
    /// Target bound on the neglected mass in truncated sums.
    pub sum_tol: f64,
    pub series_max_terms: usize,
    pub mc_pairs: usize,
    pub seed: u64,
}

impl Default for GiniOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureSpec::default(),
            sum_tol: 1e-12,
            series_max_terms: 100_000,
            mc_pairs: 1_000_000,
            seed: 0x5EED,
        }
    }
}

fn nb_params(spec: &DistributionSpec) -> Option<(f64, f64)> {
    match *spec {
        DistributionSpec::NegativeBinomial { k, p } => Some((k, p)),
        _ => None,
    }
}

fn unsupported(spec: &DistributionSpec, operation: &'static str) -> GiniError {
    GiniError::Unsupported {
        operation,
        distribution: spec.to_string(),
    }
}

/// Evaluates `G` for `spec` with the given method.
pub fn gini(spec: &DistributionSpec, method: GiniMethod, opts: &GiniOptions) -> Result<GiniResult> {
    spec.validate()?;
    let nb = || nb_params(spec).ok_or_else(|| unsupported(spec, method.name()));
    match method {
        GiniMethod::ClosedForm => gini_closed_form(spec),
        GiniMethod::ExcessSum => gini_excess_sum(spec, opts.sum_tol),
        GiniMethod::FourierDiscrete => gini_fourier_discrete(spec, &opts.quadrature, FourierVariant::Product),
        GiniMethod::FourierDiscreteAlt => {
            gini_fourier_discrete(spec, &opts.quadrature, FourierVariant::SquaredMagnitude)
        }
        GiniMethod::FourierContinuous => gini_fourier_continuous(spec, &opts.quadrature),
        GiniMethod::NbFourier => {
            let (k, p) = nb()?;
            gini_nb_fourier(k, p, &opts.quadrature)
        }
        GiniMethod::NbSeries => {
            let (k, p) = nb()?;
            gini_nb_series(k, p, opts.series_max_terms)
        }
        GiniMethod::ClassicPairwise => gini_classic_pairwise(spec, opts.sum_tol),
        GiniMethod::MonteCarlo => gini_monte_carlo(spec, opts.mc_pairs, opts.seed),
        GiniMethod::AsymptoticSmallK => {
            let (k, p) = nb()?;
            asymptotics::gini_small_k(k, p)
        }
        GiniMethod::AsymptoticLargeK => {
            let (k, p) = nb()?;
            asymptotics::gini_large_k(k, asymptotics::lambda_from_p(p))
        }
        GiniMethod::Empirical => Err(unsupported(spec, "empirical estimation without a sample")),
    }
}

/// Methods that can evaluate `spec`, excluding the asymptotic formulas.
pub fn applicable_methods(spec: &DistributionSpec) -> Vec<GiniMethod> {
    use GiniMethod::*;
    let mut out = Vec::new();
    if matches!(
        spec,
        DistributionSpec::Exponential { .. }
            | DistributionSpec::Geometric { .. }
            | DistributionSpec::Pareto { .. }
            | DistributionSpec::UniformContinuous { .. }
    ) {
        out.push(ClosedForm);
    }
    if spec.is_discrete() {
        out.extend([ExcessSum, FourierDiscrete, FourierDiscreteAlt, ClassicPairwise]);
    } else {
        out.push(FourierContinuous);
    }
    if let Some((_, p)) = nb_params(spec) {
        out.push(NbFourier);
        if p > nb_series_min_p() {
            out.push(NbSeries);
        }
    }
    out.push(MonteCarlo);
    out
}

pub fn gini_closed_form(spec: &DistributionSpec) -> Result<GiniResult> {
    spec.validate()?;
    let value = match *spec {
        DistributionSpec::Exponential { .. } => 0.5,
        DistributionSpec::Geometric { p, support_start } => match support_start {
            SupportStart::Zero => 1.0 / (2.0 - p),
            SupportStart::One => (1.0 - p) / (2.0 - p),
        },
        DistributionSpec::Pareto { alpha, .. } => 1.0 / (2.0 * alpha - 1.0),
        DistributionSpec::UniformContinuous { a, b } => (b - a) / (3.0 * (b + a)),
        _ => return Err(unsupported(spec, "closed-form Gini")),
    };
    Ok(GiniResult::new(value, GiniMethod::ClosedForm, 0.0))
}

/// Truncated mass function of a discrete law, cut where the remaining tail
/// is certainly below `tol`.
struct Truncated {
    pmf: Vec<f64>,
    /// `P(X > J)`.
    tail: f64,
    /// `E[X; X > J]`.
    upper_first_moment: f64,
    /// `E[(X - J)^+]`.
    upper_excess: f64,
}

const TRUNCATION_CAP: u64 = 50_000_000;

/// Upper bound on `pmf(i + 1) / pmf(i)` for every `i >= j`.
fn ratio_bound(spec: &DistributionSpec, j: u64) -> f64 {
    let jf = j as f64;
    match *spec {
        DistributionSpec::Poisson { lambda } => lambda / (jf + 1.0),
        DistributionSpec::Geometric { p, .. } => 1.0 - p,
        DistributionSpec::NegativeBinomial { k, p } => {
            let q = 1.0 - p;
            if k <= 1.0 {
                q
            } else {
                q * (k + jf) / (jf + 1.0)
            }
        }
        _ => f64::INFINITY,
    }
}

fn truncate(spec: &DistributionSpec, tol: f64) -> Result<Truncated> {
    if !(tol > 0.0) {
        return Err(GiniError::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "must be positive",
        });
    }
    let first = match *spec {
        DistributionSpec::Geometric {
            support_start: SupportStart::One,
            ..
        } => 1,
        _ => 0,
    };
    let mut pmf = Vec::new();
    let mut j = 0u64;
    loop {
        let pj = spec.pmf(j)?;
        pmf.push(pj);
        let r = ratio_bound(spec, j);
        if j >= first && r < 1.0 && pj < tol && pj * r / (1.0 - r) < 0.5 * tol {
            break;
        }
        j += 1;
        if j > TRUNCATION_CAP {
            return Err(GiniError::NonConvergence {
                what: "tail truncation",
                last_estimate: j as f64,
                error_estimate: pj,
            });
        }
    }
    let big_j = j;
    let mut tail = Kahan::default();
    let mut first = Kahan::default();
    let mut excess = Kahan::default();
    let mut i = big_j + 1;
    loop {
        let pi = spec.pmf(i)?;
        tail.add(pi);
        first.add(pi * i as f64);
        excess.add(pi * (i - big_j) as f64);
        if pi == 0.0 || pi * (i as f64) <= 1e-18 * first.sum() {
            break;
        }
        i += 1;
    }
    Ok(Truncated {
        pmf,
        tail: tail.sum(),
        upper_first_moment: first.sum(),
        upper_excess: excess.sum(),
    })
}

/// `G = sum_j P(X = j) P(X*_d >= j)`, with the excess tail built from
/// backward sums so that no small quantity is formed by subtraction.
pub fn gini_excess_sum(spec: &DistributionSpec, tol: f64) -> Result<GiniResult> {
    spec.validate()?;
    if !spec.is_discrete() {
        return Err(unsupported(spec, "excess-sum Gini"));
    }
    let mean = spec.mean();
    let t = truncate(spec, tol)?;
    let n = t.pmf.len();
    // survival P(X > j) for j = 0..n-1
    let mut surv = vec![0.0; n];
    let mut acc = Kahan::default();
    acc.add(t.tail);
    for j in (0..n).rev() {
        surv[j] = acc.sum();
        acc.add(t.pmf[j]);
    }
    let mut g = Kahan::default();
    let mut excess = Kahan::default();
    excess.add(t.upper_excess);
    for j in (0..n).rev() {
        excess.add(surv[j]);
        g.add(t.pmf[j] * excess.sum() / mean);
    }
    let mut r = GiniResult::new(g.sum(), GiniMethod::ExcessSum, t.tail + n as f64 * f64::EPSILON);
    r.truncation_tail_bound = Some(t.tail);
    r.finalize()
}

/// Direct truncated double sum `sum_i sum_j |i - j| p_i p_j / (2 E)`.
pub fn gini_classic_pairwise(spec: &DistributionSpec, tol: f64) -> Result<GiniResult> {
    spec.validate()?;
    if !spec.is_discrete() {
        return Err(unsupported(spec, "pairwise Gini"));
    }
    let mean = spec.mean();
    let t = truncate(spec, tol)?;
    let total: f64 = t
        .pmf
        .par_iter()
        .enumerate()
        .map(|(i, &pi)| {
            let mut row = Kahan::default();
            for (j, &pj) in t.pmf.iter().enumerate() {
                row.add((i as f64 - j as f64).abs() * pj);
            }
            pi * row.sum()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Kahan::default(), |mut k, x| {
            k.add(x);
            k
        })
        .sum();
    let bound = (t.upper_first_moment + mean * t.tail) / mean;
    let n = t.pmf.len() as f64;
    let mut r = GiniResult::new(
        total / (2.0 * mean),
        GiniMethod::ClassicPairwise,
        bound + n * f64::EPSILON,
    );
    r.truncation_tail_bound = Some(bound);
    r.finalize()
}

fn check_discrete(spec: &DistributionSpec, what: &'static str) -> Result<()> {
    spec.validate()?;
    if spec.is_discrete() {
        Ok(())
    } else {
        Err(unsupported(spec, what))
    }
}

fn check_continuous(spec: &DistributionSpec, what: &'static str) -> Result<()> {
    spec.validate()?;
    if spec.is_discrete() {
        Err(unsupported(spec, what))
    } else {
        Ok(())
    }
}

/// `1 - p(theta) - E (e^{-i theta} - 1)`, formed from `p(theta) - 1` so the
/// `O(theta^2)` result keeps its relative accuracy.
fn discrete_core(spec: &DistributionSpec, mean: f64, theta: f64) -> Complex64 {
    let m = spec.char_fn_minus_one(theta);
    -m - cis_minus_one(theta).conj() * mean
}

/// Transform `sum_j P(X*_d >= j) e^{i theta j}` of the discrete excess tail
/// for an integer-valued law, or `int_0^inf P(X* >= x) e^{-i theta x} dx` of
/// the excess tail of a continuous law.
pub fn excess_tail_transform(spec: &DistributionSpec, theta: f64) -> Result<Complex64> {
    spec.validate()?;
    let mean = spec.mean();
    if spec.is_discrete() {
        let d = one_minus_cos(theta);
        if d < 1e-24 {
            return Err(GiniError::Domain(format!(
                "excess tail transform is singular at theta = {theta}"
            )));
        }
        Ok(discrete_core(spec, mean, theta) / (2.0 * d * mean))
    } else {
        if theta == 0.0 {
            return Err(GiniError::Domain(
                "excess tail transform is singular at theta = 0".into(),
            ));
        }
        let m = spec.char_fn_minus_one(theta);
        Ok((-m.conj() - I * (theta * mean)) / (theta * theta * mean))
    }
}

/// Circle-integral representation for integer-valued laws.
pub fn gini_fourier_discrete(
    spec: &DistributionSpec,
    q: &QuadratureSpec,
    variant: FourierVariant,
) -> Result<GiniResult> {
    check_discrete(spec, "discrete Fourier Gini")?;
    let mean = spec.mean();
    let integrand = |theta: f64| -> Complex64 {
        let numerator = match variant {
            FourierVariant::Product => discrete_core(spec, mean, theta) * spec.char_fn(-theta),
            FourierVariant::SquaredMagnitude => {
                // (1 - E c*)(1 + m*) - |1 + m|^2 with c = e^{i theta} - 1
                let m = spec.char_fn_minus_one(theta);
                let c = cis_minus_one(theta);
                -m - c.conj() * mean - (c * m).conj() * mean - m.norm_sqr()
            }
        };
        numerator / one_minus_cos(theta)
    };
    let scale = 4.0 * PI * mean;
    let qq = q.with_tol(q.target_abs_tol * scale);
    let r = integrate_periodic(&integrand, &qq)?;
    let method = match variant {
        FourierVariant::Product => GiniMethod::FourierDiscrete,
        FourierVariant::SquaredMagnitude => GiniMethod::FourierDiscreteAlt,
    };
    let mut out = GiniResult::new(r.value.re / scale, method, r.abs_error / scale);
    out.imag_residual = Some(r.value.im.abs() / scale);
    out.finalize()
}

/// `Re int_T^inf e^{i a theta} / theta^2 d theta` for `a >= 0`, `a T >= 30`.
fn oscillatory_tail(a: f64, t: f64) -> f64 {
    if a == 0.0 {
        return 1.0 / t;
    }
    // -e^{iaT} / (i a T^2) * sum_n (n+1)! / (i a T)^n, an asymptotic series
    let z = I * (a * t);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 1..60 {
        let next = term * ((n + 1) as f64) / z;
        if next.norm() >= term.norm() {
            break;
        }
        term = next;
        sum += term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    (-Complex64::from_polar(1.0, a * t) / (I * a * t * t) * sum).re
}

/// Real-line representation for continuous laws.
///
/// The integral is truncated to `[-T, T]`. Its leading neglected part, fixed
/// by the jumps of the density, is added back analytically; what remains is
/// estimated by repeating the computation on `[-T/2, T/2]`.
pub fn gini_fourier_continuous(spec: &DistributionSpec, q: &QuadratureSpec) -> Result<GiniResult> {
    check_continuous(spec, "continuous Fourier Gini")?;
    let mean = spec.mean();
    let jumps = spec.density_jumps()?;
    let t = jumps
        .iter()
        .filter(|(x, _)| *x > 0.0)
        .fold(q.truncation_halfwidth, |t, (x, _)| t.max(60.0 / x));
    let integrand = |theta: f64| -> Complex64 {
        let m = spec.char_fn_minus_one(theta);
        (m + 1.0) * (-m.conj() - I * (theta * mean)) / (theta * theta)
    };
    let scale = 2.0 * PI * mean;
    let qq = QuadratureSpec {
        truncation_halfwidth: t,
        ..q.with_tol(q.target_abs_tol * scale)
    };
    let segs = line_segments(t, qq.grading_levels);
    let r = integrate_segments(&integrand, &segs, &[0.0], &qq)?;
    let correction =
        |t: f64| -> f64 { 2.0 * mean * jumps.iter().map(|&(x, d)| d * oscillatory_tail(x, t)).sum::<f64>() };
    let full = r.total() + correction(t);
    let half = r.partial(-0.5 * t, 0.5 * t) + correction(0.5 * t);
    let residual = (full.re - half.re).abs() / scale;
    let mut out = GiniResult::new(
        full.re / scale,
        GiniMethod::FourierContinuous,
        r.total_error() / scale + residual,
    );
    out.imag_residual = Some(full.im.abs() / scale);
    out.truncation_tail_bound = Some(residual);
    out.finalize()
}

/// Circle integral specialised to the negative binomial, written directly in
/// `k` and `p`; `k` may be any positive real.
pub fn gini_nb_fourier(k: f64, p: f64, q: &QuadratureSpec) -> Result<GiniResult> {
    DistributionSpec::negative_binomial(k, p)?;
    let odds = (1.0 - p) / p;
    let mean = k * odds;
    let shape = 2.0 * (1.0 - p) / (p * p);
    let integrand = |theta: f64| -> Complex64 {
        let cc = cis_minus_one(theta).conj();
        let d = one_minus_cos(theta);
        // ln (p / (1 - (1-p) e^{-i theta}))^k
        let l = -ln_1p(-cc * odds) * k;
        // ln (p^2 / (p^2 + 2(p-1)(cos theta - 1)))^k
        let lm = -k * (shape * d).ln_1p();
        let el = expm1(l);
        (el - lm.exp_m1() - cc * mean * (el + 1.0)) / (2.0 * d)
    };
    let scale = 2.0 * PI * mean;
    let qq = q.with_tol(q.target_abs_tol * scale);
    let r = integrate_periodic(&integrand, &qq)?;
    let mut out = GiniResult::new(r.value.re / scale, GiniMethod::NbFourier, r.abs_error / scale);
    out.imag_residual = Some(r.value.im.abs() / scale);
    out.finalize()
}

/// Alternating series in Catalan numbers. Converges only for
/// `4 (1 - p) / p^2 < 1`; near that boundary it loses accuracy quickly.
pub fn gini_nb_series(k: f64, p: f64, max_terms: usize) -> Result<GiniResult> {
    DistributionSpec::negative_binomial(k, p)?;
    let x = (1.0 - p) / (p * p);
    if !(4.0 * x < 1.0) || p <= nb_series_min_p() {
        return Err(GiniError::Domain(format!(
            "series diverges for p = {p}: 4(1-p)/p^2 = {:.4} >= 1 (needs p > {:.6})",
            4.0 * x,
            nb_series_min_p()
        )));
    }
    let mut term = 1.0;
    let mut sum = Kahan::default();
    sum.add(term);
    let mut last = term;
    for i in 0..max_terms.saturating_sub(1) {
        let fi = i as f64;
        // C(k+i+1, i+1)/C(k+i, i) = (k+i+1)/(i+1); Cat(i+1)/Cat(i) = 2(2i+1)/(i+2)
        term *= -x * (k + fi + 1.0) / (fi + 1.0) * 2.0 * (2.0 * fi + 1.0) / (fi + 2.0);
        sum.add(term);
        last = term;
        if term.abs() <= 1e-17 * sum.sum().abs() {
            break;
        }
    }
    let r = GiniResult::new(sum.sum() / p, GiniMethod::NbSeries, last.abs() / p);
    r.finalize()
}

/// Number of independent generator streams used by the Monte-Carlo path.
const MC_BATCHES: usize = 1000;
const BOOTSTRAP_RESAMPLES: usize = 200;

/// Monte-Carlo estimate of `E|X1 - X2| / (2 E[X])` from `n_pairs` pairs.
pub fn gini_monte_carlo(spec: &DistributionSpec, n_pairs: usize, seed: u64) -> Result<GiniResult> {
    gini_monte_carlo_scaled(spec, n_pairs, seed, 1.0)
}

/// As [`gini_monte_carlo`], with every draw multiplied by `scale`.
///
/// Pairs are split into fixed batches, each with its own ChaCha stream, so
/// the result does not depend on thread scheduling. The standard error is a
/// bootstrap over batches.
pub fn gini_monte_carlo_scaled(spec: &DistributionSpec, n_pairs: usize, seed: u64, scale: f64) -> Result<GiniResult> {
    if n_pairs < 1000 {
        return Err(GiniError::InvalidParameter {
            name: "n_pairs",
            value: n_pairs as f64,
            reason: "at least 1000 pairs are required",
        });
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(GiniError::InvalidParameter {
            name: "scale",
            value: scale,
            reason: "must be a positive finite number",
        });
    }
    let sampler = spec.sampler()?;
    let base = n_pairs / MC_BATCHES;
    let extra = n_pairs % MC_BATCHES;
    let batches: Vec<(f64, f64)> = (0..MC_BATCHES)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let n = base + usize::from(b < extra);
            let mut diff = Kahan::default();
            let mut total = Kahan::default();
            for _ in 0..n {
                let x1 = sampler.draw(&mut rng) * scale;
                let x2 = sampler.draw(&mut rng) * scale;
                diff.add((x1 - x2).abs());
                total.add(x1 + x2);
            }
            (diff.sum(), total.sum())
        })
        .collect();
    let ratio = |sel: &mut dyn Iterator<Item = usize>| {
        let (d, t) = sel.fold((0.0, 0.0), |(d, t), i| (d + batches[i].0, t + batches[i].1));
        d / t
    };
    let estimate = ratio(&mut (0..MC_BATCHES));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(MC_BATCHES as u64);
    let boot: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| ratio(&mut (0..MC_BATCHES).map(|_| rng.random_range(0..MC_BATCHES))))
        .collect();
    let se = std_dev(&boot);
    if !estimate.is_finite() {
        return Err(GiniError::Domain(format!("Monte-Carlo sample of {spec} has zero mean")));
    }
    let mut r = GiniResult::new(estimate, GiniMethod::MonteCarlo, se);
    r.mc_standard_error = Some(se);
    r.finalize()
}

pub(crate) fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn geo(p: f64) -> DistributionSpec {
        DistributionSpec::geometric(p, SupportStart::Zero).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let e = DistributionSpec::exponential(3.0).unwrap();
        assert_eq!(gini_closed_form(&e).unwrap().value, 0.5);
        assert_abs_diff_eq!(gini_closed_form(&geo(0.5)).unwrap().value, 2.0 / 3.0, epsilon = 1e-15);
        let par = DistributionSpec::pareto(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(gini_closed_form(&par).unwrap().value, 1.0 / 3.0, epsilon = 1e-15);
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(gini_closed_form(&u).unwrap().value, 1.0 / 3.0, epsilon = 1e-15);
        let pois = DistributionSpec::poisson(1.0).unwrap();
        assert!(matches!(gini_closed_form(&pois), Err(GiniError::Unsupported { .. })));
    }

    #[test]
    fn excess_sum_examples() {
        let r = gini_excess_sum(&geo(0.5), 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 2.0 / 3.0, epsilon = 1e-10);
        assert!(r.truncation_tail_bound.unwrap() < 1e-12);
        let nb = DistributionSpec::negative_binomial(1.0, 0.3).unwrap();
        assert_abs_diff_eq!(gini_excess_sum(&nb, 1e-12).unwrap().value, 1.0 / 1.7, epsilon = 1e-10);
        // support starting at 1, where P(X = 0) = 0
        let shifted = DistributionSpec::geometric(0.5, SupportStart::One).unwrap();
        let r = gini_excess_sum(&shifted, 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / 3.0, epsilon = 1e-10);
        assert!(r.abs_error_estimate < 1e-10);
    }

    #[test]
    fn fourier_discrete_examples() {
        for variant in [FourierVariant::Product, FourierVariant::SquaredMagnitude] {
            let r = gini_fourier_discrete(&geo(0.5), &q(), variant).unwrap();
            assert_abs_diff_eq!(r.value, 2.0 / 3.0, epsilon = 1e-8);
            assert!(r.imag_residual.unwrap() < 1e-10);
            let nb = DistributionSpec::negative_binomial(1.0, 0.5).unwrap();
            let r = gini_fourier_discrete(&nb, &q(), variant).unwrap();
            assert_abs_diff_eq!(r.value, 2.0 / 3.0, epsilon = 1e-8);
            let pois = DistributionSpec::poisson(1.0).unwrap();
            let oracle = gini_excess_sum(&pois, 1e-14).unwrap().value;
            let r = gini_fourier_discrete(&pois, &q(), variant).unwrap();
            assert_abs_diff_eq!(r.value, oracle, epsilon = 1e-8);
        }
    }

    #[test]
    fn fourier_continuous_examples() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        let r = gini_fourier_continuous(&e, &q()).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-6);
        assert!((r.value - 0.5).abs() <= r.abs_error_estimate + 1e-9);
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            gini_fourier_continuous(&u, &q()).unwrap().value,
            1.0 / 3.0,
            epsilon = 1e-6
        );
        let par = DistributionSpec::pareto(3.0, 1.0).unwrap();
        assert_abs_diff_eq!(gini_fourier_continuous(&par, &q()).unwrap().value, 0.2, epsilon = 1e-5);
    }

    #[test]
    fn oscillatory_tail_matches_quadrature() {
        // int_T^inf cos(a t)/t^2 dt by brute force on a long finite window
        let (a, t) = (1.0, 60.0);
        let upper = 60.0 + 2.0 * PI * 4000.0;
        let f = |s: f64| Complex64::new((a * s).cos() / (s * s), 0.0);
        let body = crate::quadrature::composite_rule(&f, t, upper, 40_000, 16).re;
        // the remaining piece beyond `upper` is below 1/upper^2 in size
        let got = oscillatory_tail(a, t);
        assert!((got - body).abs() < 1e-8, "{got} vs {body}");
    }

    #[test]
    fn nb_fourier_examples() {
        assert_abs_diff_eq!(
            gini_nb_fourier(1.0, 0.5, &q()).unwrap().value,
            2.0 / 3.0,
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(
            gini_nb_fourier(0.06, 0.008, &q()).unwrap().value,
            0.9269144,
            epsilon = 1e-4
        );
        assert_abs_diff_eq!(
            gini_nb_fourier(0.2, 0.06, &q()).unwrap().value,
            0.8151066,
            epsilon = 1e-4
        );
    }

    #[test]
    fn nb_series_examples() {
        assert_abs_diff_eq!(
            gini_nb_series(1.0, 0.9, 10_000).unwrap().value,
            1.0 / 1.1,
            epsilon = 1e-12
        );
        let series = gini_nb_series(2.0, 0.9, 10_000).unwrap().value;
        let fourier = gini_nb_fourier(2.0, 0.9, &q()).unwrap().value;
        assert_abs_diff_eq!(series, fourier, epsilon = 1e-7);
        assert!(matches!(gini_nb_series(1.0, 0.3, 10_000), Err(GiniError::Domain(_))));
        let edge = 2.0 * (2f64.sqrt() - 1.0);
        assert!(matches!(gini_nb_series(1.0, edge, 10_000), Err(GiniError::Domain(_))));
    }

    #[test]
    fn pairwise_examples() {
        assert_abs_diff_eq!(
            gini_classic_pairwise(&geo(0.5), 1e-12).unwrap().value,
            2.0 / 3.0,
            epsilon = 1e-9
        );
        let shifted = DistributionSpec::geometric(0.1, SupportStart::One).unwrap();
        assert_abs_diff_eq!(
            gini_classic_pairwise(&shifted, 1e-12).unwrap().value,
            0.9 / 1.9,
            epsilon = 1e-9
        );
        let pois = DistributionSpec::poisson(1.0).unwrap();
        let f = gini_fourier_discrete(&pois, &q(), FourierVariant::default())
            .unwrap()
            .value;
        assert_abs_diff_eq!(gini_classic_pairwise(&pois, 1e-12).unwrap().value, f, epsilon = 1e-7);
        let nb = DistributionSpec::negative_binomial(2.0, 0.5).unwrap();
        let e = gini_excess_sum(&nb, 1e-12).unwrap().value;
        assert_abs_diff_eq!(gini_classic_pairwise(&nb, 1e-12).unwrap().value, e, epsilon = 1e-8);
    }

    #[test]
    fn transform_examples() {
        // direct truncated transform of j -> P(X*_d >= j)
        let g = geo(0.5);
        let direct: Complex64 = (0..200)
            .map(|j| Complex64::from_polar(g.excess_tail_discrete(j), PI * j as f64))
            .sum();
        let got = excess_tail_transform(&g, PI).unwrap();
        assert!((got - direct).norm() < 1e-8);
        let pois = DistributionSpec::poisson(2.0).unwrap();
        let a = excess_tail_transform(&pois, PI).unwrap();
        let b = excess_tail_transform(&pois, -PI).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
        let e = DistributionSpec::exponential(1.0).unwrap();
        let expected = Complex64::new(1.0, 0.0) - e.char_fn(-1.0) - I;
        assert!((excess_tail_transform(&e, 1.0).unwrap() - expected).norm() < 1e-14);
        assert!(excess_tail_transform(&g, 0.0).is_err());
        assert!(excess_tail_transform(&e, 0.0).is_err());
    }

    #[test]
    fn finalize_clamps_and_rejects() {
        let r = GiniResult::new(1.0 + 1e-12, GiniMethod::ExcessSum, 1e-10)
            .finalize()
            .unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.clamped);
        assert!(matches!(
            GiniResult::new(-0.1, GiniMethod::ExcessSum, 1e-10).finalize(),
            Err(GiniError::OutOfRange { .. })
        ));
        let mut r = GiniResult::new(0.5, GiniMethod::FourierDiscrete, 0.0);
        r.imag_residual = Some(1e-3);
        assert!(matches!(r.finalize(), Err(GiniError::ImaginaryResidual { .. })));
    }

    #[test]
    fn method_names_round_trip() {
        for m in GiniMethod::ALL {
            assert_eq!(m.name().parse::<GiniMethod>().unwrap(), m);
        }
        assert!("bogus".parse::<GiniMethod>().is_err());
    }

    #[test]
    fn monte_carlo_small() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        let r = gini_monte_carlo(&e, 200_000, 7).unwrap();
        assert!((r.value - 0.5).abs() < 3.0 * r.mc_standard_error.unwrap());
        let again = gini_monte_carlo(&e, 200_000, 7).unwrap();
        assert_eq!(r.value, again.value);
        assert!(gini_monte_carlo(&e, 10, 7).is_err());
    }
}
