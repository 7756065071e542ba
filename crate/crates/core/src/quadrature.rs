//! Composite Gauss-Legendre integration of complex-valued integrands.
//!
//! The Fourier representations of the Gini coefficient have a removable
//! singularity (a `0/0` form) at `theta = 0`. Both integrators lay out panels that are geometrically
//! graded toward those points and rely on Gauss-Legendre nodes never
//! touching a panel endpoint. Each graded segment is refined on its own by
//! doubling its sub-panel count until two successive estimates agree.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::{GiniError, Result};

/// What to do with nodes that fall close to a removable singular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointPolicy {
    /// Plain Gauss-Legendre panels; the singular point itself is never sampled.
    AvoidEndpoints,
    /// Within `radius` of a singular point, evaluate the integrand's series
    /// expansion (see [`Integrand::near_singular`]) instead of the raw formula.
    AnalyticLimit { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Initial number of uniform sub-panels in every graded segment.
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub endpoint_policy: EndpointPolicy,
    /// Half-width `T` of the window `[-T, T]` used by [`integrate_line`].
    pub truncation_halfwidth: f64,
    pub target_abs_tol: f64,
    /// Maximum number of panel doublings per segment.
    pub max_refinements: u32,
    /// Number of dyadic grading levels toward each singular point.
    pub grading_levels: u32,
    /// Segments wider than this start with proportionally more panels.
    pub max_panel_width: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels: 1,
            nodes_per_panel: 16,
            endpoint_policy: EndpointPolicy::AvoidEndpoints,
            truncation_halfwidth: 1e3,
            target_abs_tol: 1e-10,
            max_refinements: 14,
            grading_levels: 96,
            max_panel_width: 4.0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.target_abs_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value: f64| GiniError::InvalidParameter {
            name,
            value,
            reason: "must be positive",
        };
        if self.panels == 0 {
            return Err(bad("panels", 0.0));
        }
        if self.nodes_per_panel == 0 {
            return Err(bad("nodes_per_panel", 0.0));
        }
        if !(self.target_abs_tol > 0.0) {
            return Err(bad("target_abs_tol", self.target_abs_tol));
        }
        if !(self.max_panel_width > 0.0) {
            return Err(bad("max_panel_width", self.max_panel_width));
        }
        if !(self.truncation_halfwidth > 0.0) {
            return Err(bad("truncation_halfwidth", self.truncation_halfwidth));
        }
        Ok(())
    }
}

/// A complex integrand, optionally carrying a series expansion about its
/// removable singular point.
pub trait Integrand: Sync {
    fn eval(&self, theta: f64) -> Complex64;

    /// Value at signed distance `offset` from the singular point, computed
    /// from a local expansion. `None` falls back to [`Integrand::eval`].
    fn near_singular(&self, _offset: f64) -> Option<Complex64> {
        None
    }
}

impl<F> Integrand for F
where
    F: Fn(f64) -> Complex64 + Sync,
{
    fn eval(&self, theta: f64) -> Complex64 {
        self(theta)
    }
}

/// Pairs an integrand with its expansion about the singular point.
pub struct WithSeries<F, S> {
    pub f: F,
    pub series: S,
}

impl<F, S> Integrand for WithSeries<F, S>
where
    F: Fn(f64) -> Complex64 + Sync,
    S: Fn(f64) -> Complex64 + Sync,
{
    fn eval(&self, theta: f64) -> Complex64 {
        (self.f)(theta)
    }

    fn near_singular(&self, offset: f64) -> Option<Complex64> {
        Some((self.series)(offset))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    /// Sum of per-segment refinement differences plus any truncation bound.
    pub abs_error: f64,
    /// Bound on the neglected tails (line integrals only; zero otherwise).
    pub truncation_bound: f64,
    pub evaluations: usize,
}

/// Per-segment results, kept so callers can form partial sums.
#[derive(Debug, Clone)]
pub struct SegmentedIntegral {
    pub segments: Vec<(f64, f64)>,
    pub values: Vec<Complex64>,
    pub errors: Vec<f64>,
    pub evaluations: usize,
}

impl SegmentedIntegral {
    pub fn total(&self) -> Complex64 {
        self.values.iter().sum()
    }

    pub fn total_error(&self) -> f64 {
        self.errors.iter().sum()
    }

    /// Sum over the segments lying inside `[lo, hi]`.
    pub fn partial(&self, lo: f64, hi: f64) -> Complex64 {
        self.segments
            .iter()
            .zip(&self.values)
            .filter(|((a, b), _)| *a >= lo && *b <= hi)
            .map(|(_, v)| *v)
            .sum()
    }
}

type Rule = Arc<[(f64, f64)]>;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, cached per order.
pub fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("gauss-legendre cache poisoned");
    map.entry(n).or_insert_with(|| compute_gauss_legendre(n)).clone()
}

fn compute_gauss_legendre(n: usize) -> Rule {
    assert!(n > 0, "at least one node");
    let mut rule = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = ((i as f64 + 0.75) * PI / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = (-x, w);
        rule[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        // middle node is exactly zero
        let mid = n / 2;
        rule[mid].0 = 0.0;
    }
    rule.into()
}

/// Fixed composite rule: `panels` equal panels on `[lo, hi]`.
pub fn composite_rule<F: Integrand + ?Sized>(f: &F, lo: f64, hi: f64, panels: usize, nodes: usize) -> Complex64 {
    composite_with_policy(
        f,
        lo,
        hi,
        panels,
        &gauss_legendre(nodes),
        EndpointPolicy::AvoidEndpoints,
        &[],
    )
}

fn composite_with_policy<F: Integrand + ?Sized>(
    f: &F,
    lo: f64,
    hi: f64,
    panels: usize,
    rule: &[(f64, f64)],
    policy: EndpointPolicy,
    singular: &[f64],
) -> Complex64 {
    let h = (hi - lo) / panels as f64;
    let half = 0.5 * h;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        let mut panel = Complex64::new(0.0, 0.0);
        for &(x, w) in rule {
            let theta = mid + half * x;
            panel += eval_with_policy(f, theta, policy, singular) * w;
        }
        acc += panel * half;
    }
    acc
}

fn eval_with_policy<F: Integrand + ?Sized>(f: &F, theta: f64, policy: EndpointPolicy, singular: &[f64]) -> Complex64 {
    if let EndpointPolicy::AnalyticLimit { radius } = policy {
        for &s in singular {
            let offset = theta - s;
            if offset.abs() < radius {
                if let Some(v) = f.near_singular(offset) {
                    return v;
                }
            }
        }
    }
    f.eval(theta)
}

/// Integrates over the given segments, refining each one independently.
pub fn integrate_segments<F: Integrand + ?Sized>(
    f: &F,
    segments: &[(f64, f64)],
    singular: &[f64],
    q: &QuadratureSpec,
) -> Result<SegmentedIntegral> {
    q.validate()?;
    let rule = gauss_legendre(q.nodes_per_panel);
    let seg_tol = q.target_abs_tol / segments.len().max(1) as f64;
    let mut out = SegmentedIntegral {
        segments: segments.to_vec(),
        values: Vec::with_capacity(segments.len()),
        errors: Vec::with_capacity(segments.len()),
        evaluations: 0,
    };
    let mut failed = false;
    for &(lo, hi) in segments {
        let mut panels = q.panels.max(((hi - lo) / q.max_panel_width).ceil() as usize);
        let mut prev = composite_with_policy(f, lo, hi, panels, &rule, q.endpoint_policy, singular);
        out.evaluations += panels * rule.len();
        let mut converged = false;
        let mut err = f64::INFINITY;
        for _ in 0..q.max_refinements {
            panels *= 2;
            let next = composite_with_policy(f, lo, hi, panels, &rule, q.endpoint_policy, singular);
            out.evaluations += panels * rule.len();
            err = (next - prev).norm();
            prev = next;
            if err <= seg_tol {
                converged = true;
                break;
            }
        }
        failed |= !converged;
        out.values.push(prev);
        out.errors.push(err);
    }
    if failed || !out.total().re.is_finite() || !out.total().im.is_finite() {
        return Err(GiniError::NonConvergence {
            what: "composite Gauss-Legendre quadrature",
            last_estimate: out.total().re,
            error_estimate: out.total_error(),
        });
    }
    Ok(out)
}

/// Dyadic breakpoints from `lo` toward the singular end `lo` of `[lo, hi]`:
/// `[lo, lo + w 2^-L], ..., [lo + w/2, hi]` with `w = hi - lo`.
fn graded_toward_start(lo: f64, hi: f64, levels: u32) -> Vec<(f64, f64)> {
    let w = hi - lo;
    let mut out = Vec::with_capacity(levels as usize + 1);
    let mut inner = lo + w * 0.5f64.powi(levels as i32);
    out.push((lo, inner));
    for l in (0..levels).rev() {
        let outer = lo + w * 0.5f64.powi(l as i32);
        out.push((inner, outer));
        inner = outer;
    }
    out
}

/// Segments for `[-T, T]`, graded toward the origin from both sides.
pub fn line_segments(halfwidth: f64, levels: u32) -> Vec<(f64, f64)> {
    let right = graded_toward_start(0.0, halfwidth, levels);
    let mut segs: Vec<_> = right.iter().rev().map(|&(a, b)| (-b, -a)).collect();
    segs.extend(right);
    segs
}

/// `int_0^{2 pi} f(theta) d theta` for a `2 pi`-periodic integrand whose
/// only trouble spot is a removable singularity at `theta = 0 (mod 2 pi)`.
///
/// The period is traversed as `[-pi, pi]`, so nodes close to the singular
/// point are small in magnitude and carry full relative precision, rather
/// than sitting just below `2 pi`.
pub fn integrate_periodic<F: Integrand + ?Sized>(f: &F, q: &QuadratureSpec) -> Result<Integral> {
    let segs = line_segments(PI, q.grading_levels);
    let r = integrate_segments(f, &segs, &[0.0], q)?;
    Ok(Integral {
        value: r.total(),
        abs_error: r.total_error(),
        truncation_bound: 0.0,
        evaluations: r.evaluations,
    })
}

/// `int_R f(theta) d theta`, truncated to `[-T, T]`. The reported error adds
/// `2 C / T` for an `O(1/theta^2)` tail, where `C` is the largest sampled
/// `|theta^2 f(theta)|` on the outer half of the window plus a 10% margin.
pub fn integrate_line<F: Integrand + ?Sized>(f: &F, q: &QuadratureSpec) -> Result<Integral> {
    let t = q.truncation_halfwidth;
    let segs = line_segments(t, q.grading_levels);
    let r = integrate_segments(f, &segs, &[0.0], q)?;
    let c = 1.1
        * [0.5, 0.625, 0.75, 0.875, 1.0]
            .iter()
            .flat_map(|&s| [s * t, -s * t])
            .map(|x| x * x * f.eval(x).norm())
            .fold(0.0, f64::max);
    let truncation_bound = 2.0 * c / t;
    Ok(Integral {
        value: r.total(),
        abs_error: r.total_error() + truncation_bound,
        truncation_bound,
        evaluations: r.evaluations,
    })
}
