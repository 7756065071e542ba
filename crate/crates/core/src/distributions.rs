//! Parametric distribution models.
//!
//! Every model exposes its mass or density, survival function, mean,
//! characteristic function and the survival function of its excess
//! (integrated-tail) variable `X*`, defined by
//! `P(X* >= x) = (1 / E[X]) * int_x^inf P(X > s) ds`.
//! For integer-valued laws the discrete excess variable `X*_d` with
//! `P(X*_d = j) = P(X > j) / E[X]` is available as well.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Geometric, Pareto, Poisson, Uniform};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::complex::{cis_minus_one, expm1, ln_1p, I};
use crate::{GiniError, Result};

/// First point of support for the geometric law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportStart {
    /// Number of failures before the first success, `P(X = j) = (1-p)^j p`.
    Zero,
    /// Number of trials up to the first success, `P(X = j) = p (1-p)^(j-1)`.
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    Poisson {
        lambda: f64,
    },
    Geometric {
        p: f64,
        support_start: SupportStart,
    },
    /// Shape `k` may be any positive real; `p` is the success probability.
    NegativeBinomial {
        k: f64,
        p: f64,
    },
    Exponential {
        rate: f64,
    },
    /// Requires `alpha > 1` so that the mean is finite.
    Pareto {
        alpha: f64,
        x_m: f64,
    },
    UniformContinuous {
        a: f64,
        b: f64,
    },
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GiniError::InvalidParameter {
            name,
            value,
            reason: "must be a positive finite number",
        })
    }
}

fn probability(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(GiniError::InvalidParameter {
            name,
            value,
            reason: "must lie strictly between 0 and 1",
        })
    }
}

impl DistributionSpec {
    pub fn poisson(lambda: f64) -> Result<Self> {
        let d = Self::Poisson { lambda };
        d.validate().map(|_| d)
    }

    pub fn geometric(p: f64, support_start: SupportStart) -> Result<Self> {
        let d = Self::Geometric { p, support_start };
        d.validate().map(|_| d)
    }

    pub fn negative_binomial(k: f64, p: f64) -> Result<Self> {
        let d = Self::NegativeBinomial { k, p };
        d.validate().map(|_| d)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let d = Self::Exponential { rate };
        d.validate().map(|_| d)
    }

    pub fn pareto(alpha: f64, x_m: f64) -> Result<Self> {
        let d = Self::Pareto { alpha, x_m };
        d.validate().map(|_| d)
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let d = Self::UniformContinuous { a, b };
        d.validate().map(|_| d)
    }

    /// Checks the parameter ranges. The enum fields are public, so every
    /// evaluation entry point calls this before doing any work.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Poisson { lambda } => positive("lambda", lambda),
            Self::Geometric { p, .. } => probability("p", p),
            Self::NegativeBinomial { k, p } => {
                positive("k", k)?;
                probability("p", p)
            }
            Self::Exponential { rate } => positive("rate", rate),
            Self::Pareto { alpha, x_m } => {
                positive("x_m", x_m)?;
                if alpha.is_finite() && alpha > 1.0 {
                    Ok(())
                } else {
                    Err(GiniError::InvalidParameter {
                        name: "alpha",
                        value: alpha,
                        reason: "must exceed 1 for a finite mean",
                    })
                }
            }
            Self::UniformContinuous { a, b } => {
                if !(a.is_finite() && a >= 0.0) {
                    return Err(GiniError::InvalidParameter {
                        name: "a",
                        value: a,
                        reason: "must be a nonnegative finite number",
                    });
                }
                if b.is_finite() && b > a {
                    Ok(())
                } else {
                    Err(GiniError::InvalidParameter {
                        name: "b",
                        value: b,
                        reason: "must be finite and exceed a",
                    })
                }
            }
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            Self::Poisson { .. } | Self::Geometric { .. } | Self::NegativeBinomial { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Poisson { .. } => "poisson",
            Self::Geometric { .. } => "geometric",
            Self::NegativeBinomial { .. } => "negative binomial",
            Self::Exponential { .. } => "exponential",
            Self::Pareto { .. } => "pareto",
            Self::UniformContinuous { .. } => "uniform",
        }
    }

    fn unsupported(&self, operation: &'static str) -> GiniError {
        GiniError::Unsupported {
            operation,
            distribution: self.to_string(),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Poisson { lambda } => lambda,
            Self::Geometric { p, support_start } => match support_start {
                SupportStart::Zero => (1.0 - p) / p,
                SupportStart::One => 1.0 / p,
            },
            Self::NegativeBinomial { k, p } => k * (1.0 - p) / p,
            Self::Exponential { rate } => 1.0 / rate,
            Self::Pareto { alpha, x_m } => alpha * x_m / (alpha - 1.0),
            Self::UniformContinuous { a, b } => 0.5 * (a + b),
        }
    }

    /// Raw moment `E[X^n]` for `n` in 1..=3, or `None` when it is infinite.
    pub fn raw_moment(&self, n: u32) -> Option<f64> {
        assert!((1..=3).contains(&n), "moments of order 1..=3 only");
        let v = match *self {
            Self::Poisson { lambda: l } => match n {
                1 => l,
                2 => l + l * l,
                _ => l * l * l + 3.0 * l * l + l,
            },
            Self::Geometric { p, support_start } => {
                let m = Self::NegativeBinomial { k: 1.0, p };
                match support_start {
                    SupportStart::Zero => m.raw_moment(n)?,
                    SupportStart::One => {
                        // Y = X + 1
                        let m1 = m.raw_moment(1)?;
                        let m2 = m.raw_moment(2)?;
                        let m3 = m.raw_moment(3)?;
                        match n {
                            1 => m1 + 1.0,
                            2 => m2 + 2.0 * m1 + 1.0,
                            _ => m3 + 3.0 * m2 + 3.0 * m1 + 1.0,
                        }
                    }
                }
            }
            Self::NegativeBinomial { k, p } => {
                let q = 1.0 - p;
                let mu = k * q / p;
                let var = k * q / (p * p);
                let mu3 = k * q * (1.0 + q) / (p * p * p);
                match n {
                    1 => mu,
                    2 => var + mu * mu,
                    _ => mu3 + 3.0 * mu * var + mu * mu * mu,
                }
            }
            Self::Exponential { rate } => {
                let f = [1.0, 2.0, 6.0][n as usize - 1];
                f / rate.powi(n as i32)
            }
            Self::Pareto { alpha, x_m } => {
                if alpha <= n as f64 {
                    return None;
                }
                alpha * x_m.powi(n as i32) / (alpha - n as f64)
            }
            Self::UniformContinuous { a, b } => {
                let m = n as i32 + 1;
                (b.powi(m) - a.powi(m)) / (m as f64 * (b - a))
            }
        };
        Some(v)
    }

    /// Natural log of the probability mass at `j`.
    pub fn ln_pmf(&self, j: u64) -> Result<f64> {
        let jf = j as f64;
        match *self {
            Self::Poisson { lambda } => Ok(-lambda + jf * lambda.ln() - ln_gamma(jf + 1.0)),
            Self::Geometric { p, support_start } => {
                let lq = (-p).ln_1p();
                Ok(match support_start {
                    SupportStart::Zero => p.ln() + jf * lq,
                    SupportStart::One if j == 0 => f64::NEG_INFINITY,
                    SupportStart::One => p.ln() + (jf - 1.0) * lq,
                })
            }
            Self::NegativeBinomial { k, p } => {
                let binom = if j == 0 {
                    0.0
                } else {
                    ln_gamma(k + jf) - ln_gamma(jf + 1.0) - ln_gamma(k)
                };
                Ok(binom + k * p.ln() + jf * (-p).ln_1p())
            }
            _ => Err(self.unsupported("pmf")),
        }
    }

    /// Probability mass at `j`; the generalized binomial coefficient
    /// `Gamma(k + j) / (Gamma(j + 1) Gamma(k))` is evaluated in log space.
    pub fn pmf(&self, j: u64) -> Result<f64> {
        self.ln_pmf(j).map(f64::exp)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        match *self {
            Self::Exponential { rate } => Ok(if x < 0.0 { 0.0 } else { rate * (-rate * x).exp() }),
            Self::Pareto { alpha, x_m } => Ok(if x < x_m {
                0.0
            } else {
                alpha * x_m.powf(alpha) / x.powf(alpha + 1.0)
            }),
            Self::UniformContinuous { a, b } => Ok(if x < a || x > b { 0.0 } else { 1.0 / (b - a) }),
            _ => Err(self.unsupported("pdf")),
        }
    }

    /// Index of the largest pmf term (discrete laws only).
    fn mode(&self) -> u64 {
        match *self {
            Self::Poisson { lambda } => lambda.floor() as u64,
            Self::Geometric { support_start, .. } => match support_start {
                SupportStart::Zero => 0,
                SupportStart::One => 1,
            },
            Self::NegativeBinomial { k, p } if k > 1.0 => ((k - 1.0) * (1.0 - p) / p).floor() as u64,
            _ => 0,
        }
    }

    /// `sum_{j > n} pmf(j)` accumulated upward until the terms are negligible.
    fn upper_sum(&self, n: u64, weight: impl Fn(u64) -> f64) -> f64 {
        let mode = self.mode();
        let mut acc = Kahan::default();
        let mut j = n + 1;
        loop {
            let term = self.pmf(j).unwrap_or(0.0) * weight(j);
            acc.add(term);
            if j > mode && (term <= 1e-18 * acc.sum() || term == 0.0) {
                break;
            }
            j += 1;
        }
        acc.sum()
    }

    /// Survival function `P(X > x)`.
    pub fn tail(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Self::Pareto { alpha, x_m } => {
                if x <= x_m {
                    1.0
                } else {
                    (x_m / x).powf(alpha)
                }
            }
            Self::UniformContinuous { a, b } => {
                if x <= a {
                    1.0
                } else if x >= b {
                    0.0
                } else {
                    (b - x) / (b - a)
                }
            }
            Self::Geometric { p, support_start } => {
                if x < 0.0 {
                    return 1.0;
                }
                let n = x.floor();
                let exponent = match support_start {
                    SupportStart::Zero => n + 1.0,
                    SupportStart::One => n,
                };
                (exponent * (-p).ln_1p()).exp()
            }
            Self::Poisson { .. } | Self::NegativeBinomial { .. } => {
                if x < 0.0 {
                    return 1.0;
                }
                let n = x.floor() as u64;
                let mut cdf = Kahan::default();
                for j in 0..=n {
                    cdf.add(self.pmf(j).unwrap_or(0.0));
                }
                if cdf.sum() < 0.5 {
                    1.0 - cdf.sum()
                } else {
                    self.upper_sum(n, |_| 1.0)
                }
            }
        }
    }

    /// `P(X* >= x)` for the continuous excess variable. For integer-valued
    /// laws this is the law of `X*_d + U` with `U ~ Uniform[0, 1]`.
    pub fn excess_tail(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let mean = self.mean();
        match *self {
            Self::Exponential { rate } => (-rate * x).exp(),
            Self::Pareto { alpha, x_m } => {
                if x >= x_m {
                    (x_m / x).powf(alpha - 1.0) / alpha
                } else {
                    // P(X > s) = 1 on [0, x_m]
                    1.0 - x / mean
                }
            }
            Self::UniformContinuous { a, b } => {
                let integral = if x >= b {
                    0.0
                } else if x >= a {
                    (b - x) * (b - x) / (2.0 * (b - a))
                } else {
                    (a - x) + 0.5 * (b - a)
                };
                integral / mean
            }
            _ => {
                let n = x.floor();
                let frac = x - n;
                let n = n as u64;
                // (1 - frac) P(X > n) / E + P(X*_d >= n + 1)
                (1.0 - frac) * self.tail(n as f64) / mean + self.excess_tail_discrete(n + 1)
            }
        }
    }

    /// `P(X*_d >= j) = sum_{m >= j} P(X > m) / E[X]` for integer-valued laws.
    pub fn excess_tail_discrete(&self, j: u64) -> f64 {
        assert!(self.is_discrete(), "discrete excess tail of a continuous law");
        let mean = self.mean();
        if let Self::Geometric { p, .. } = *self {
            return (j as f64 * (-p).ln_1p()).exp();
        }
        // sum_{m < j} P(X > m), then E - that sum = E[(X - j)^+]
        let mut cdf = Kahan::default();
        let mut partial = Kahan::default();
        for m in 0..j {
            cdf.add(self.pmf(m).unwrap_or(0.0));
            partial.add(1.0 - cdf.sum());
        }
        let head = (mean - partial.sum()) / mean;
        if head > 0.5 {
            head
        } else {
            // sum_{i > j} (i - j) pmf(i) avoids the subtraction
            self.upper_sum(j, |i| (i - j) as f64) / mean
        }
    }

    /// `ln E[exp(i theta X)]` for the laws whose transform has a closed form
    /// amenable to logarithms.
    fn ln_char_fn(&self, theta: f64) -> Option<Complex64> {
        match *self {
            Self::Poisson { lambda } => Some(cis_minus_one(theta) * lambda),
            Self::NegativeBinomial { k, p } => {
                let z = -cis_minus_one(theta) * ((1.0 - p) / p);
                Some(-ln_1p(z) * k)
            }
            Self::Geometric { p, support_start } => {
                let base = Self::NegativeBinomial { k: 1.0, p }.ln_char_fn(theta)?;
                Some(match support_start {
                    SupportStart::Zero => base,
                    SupportStart::One => base + I * theta,
                })
            }
            Self::Exponential { rate } => Some(-ln_1p(Complex64::new(0.0, -theta / rate))),
            _ => None,
        }
    }

    /// Characteristic function `E[exp(i theta X)]`.
    pub fn char_fn(&self, theta: f64) -> Complex64 {
        match self.ln_char_fn(theta) {
            Some(l) => l.exp(),
            None => self.char_fn_minus_one(theta) + 1.0,
        }
    }

    /// `E[exp(i theta X)] - 1`, accurate to full relative precision near
    /// `theta = 0` where the Fourier integrands cancel.
    pub fn char_fn_minus_one(&self, theta: f64) -> Complex64 {
        if theta == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if let Some(l) = self.ln_char_fn(theta) {
            return expm1(l);
        }
        match *self {
            Self::UniformContinuous { a, b } => {
                // e^{i c} sinc(d) - 1 = (e^{i c} - 1) sinc(d) + (sinc(d) - 1)
                let c = 0.5 * (a + b) * theta;
                let d = 0.5 * (b - a) * theta;
                let s = sinc(d);
                cis_minus_one(c) * s + (sinc_minus_one(d))
            }
            Self::Pareto { alpha, x_m } => pareto_char_fn_minus_one(alpha, theta * x_m),
            _ => unreachable!("closed-form transforms handled above"),
        }
    }

    /// Points where the density jumps, with the jump size `f(x+) - f(x-)`.
    /// These fix the leading `1/theta` decay of the characteristic function.
    pub fn density_jumps(&self) -> Result<Vec<(f64, f64)>> {
        match *self {
            Self::Exponential { rate } => Ok(vec![(0.0, rate)]),
            Self::Pareto { alpha, x_m } => Ok(vec![(x_m, alpha / x_m)]),
            Self::UniformContinuous { a, b } => {
                let h = 1.0 / (b - a);
                Ok(vec![(a, h), (b, -h)])
            }
            _ => Err(self.unsupported("density jumps")),
        }
    }

    /// Draws `n` values with a ChaCha8 generator seeded by `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(GiniError::Empty("sample size must be at least 1"));
        }
        let sampler = self.sampler()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..n).map(|_| sampler.draw(&mut rng)).collect())
    }

    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        let bad = |e: &dyn fmt::Display| GiniError::Domain(format!("cannot build a sampler for {self}: {e}"));
        Ok(match *self {
            Self::Poisson { lambda } => Sampler::Poisson(Poisson::new(lambda).map_err(|e| bad(&e))?),
            Self::Geometric { p, support_start } => Sampler::Geometric {
                dist: Geometric::new(p).map_err(|_| GiniError::Domain(format!("bad p {p}")))?,
                shift: match support_start {
                    SupportStart::Zero => 0.0,
                    SupportStart::One => 1.0,
                },
            },
            Self::NegativeBinomial { k, p } => {
                // Poisson with a Gamma(k, rate lambda) intensity, lambda = p / (1 - p)
                let rate = p / (1.0 - p);
                Sampler::PoissonGamma(Gamma::new(k, 1.0 / rate).map_err(|e| bad(&e))?)
            }
            Self::Exponential { rate } => Sampler::Exponential(Exp::new(rate).map_err(|e| bad(&e))?),
            Self::Pareto { alpha, x_m } => Sampler::Pareto(Pareto::new(x_m, alpha).map_err(|e| bad(&e))?),
            Self::UniformContinuous { a, b } => {
                Sampler::Uniform(Uniform::new(a, b).map_err(|_| GiniError::Domain(format!("bad range [{a}, {b})")))?)
            }
        })
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Poisson { lambda } => write!(f, "Poisson(lambda={lambda})"),
            Self::Geometric { p, support_start } => {
                let s = match support_start {
                    SupportStart::Zero => 0,
                    SupportStart::One => 1,
                };
                write!(f, "Geometric(p={p}, start={s})")
            }
            Self::NegativeBinomial { k, p } => write!(f, "NegBinomial(k={k}, p={p})"),
            Self::Exponential { rate } => write!(f, "Exponential(rate={rate})"),
            Self::Pareto { alpha, x_m } => write!(f, "Pareto(alpha={alpha}, x_m={x_m})"),
            Self::UniformContinuous { a, b } => write!(f, "Uniform(a={a}, b={b})"),
        }
    }
}

/// Prepared random-variate generator for one [`DistributionSpec`].
#[derive(Debug, Clone)]
pub enum Sampler {
    Poisson(Poisson<f64>),
    Geometric {
        dist: Geometric,
        shift: f64,
    },
    /// Negative binomial as a Poisson count with Gamma-distributed intensity.
    /// `rand_distr` switches to a boosted method for shape < 1.
    PoissonGamma(Gamma<f64>),
    Exponential(Exp<f64>),
    Pareto(Pareto<f64>),
    Uniform(Uniform<f64>),
}

impl Sampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Poisson(d) => d.sample(rng),
            Self::Geometric { dist, shift } => dist.sample(rng) as f64 + shift,
            Self::PoissonGamma(g) => {
                let intensity = g.sample(rng);
                if intensity > 0.0 {
                    // sub-normal intensities are rejected by rand_distr
                    Poisson::new(intensity).map(|d| d.sample(rng)).unwrap_or(0.0)
                } else {
                    0.0
                }
            }
            Self::Exponential(d) => d.sample(rng),
            Self::Pareto(d) => d.sample(rng),
            Self::Uniform(d) => d.sample(rng),
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

fn sinc(d: f64) -> f64 {
    if d.abs() < 1e-4 {
        1.0 + sinc_minus_one(d)
    } else {
        d.sin() / d
    }
}

/// `sin(d)/d - 1`.
fn sinc_minus_one(d: f64) -> f64 {
    if d.abs() < 0.5 {
        let d2 = d * d;
        // -d^2/3! + d^4/5! - ...
        let mut term = -d2 / 6.0;
        let mut acc = term;
        let mut n = 3.0;
        while term.abs() > 1e-18 * acc.abs().max(1e-300) {
            term *= -d2 / ((2.0 * n - 1.0) * (2.0 * n - 2.0));
            acc += term;
            n += 1.0;
            if n > 40.0 {
                break;
            }
        }
        acc
    } else {
        d.sin() / d - 1.0
    }
}

/// `R(w) = int_w^inf u^(-alpha-1) e^{iu} du` for `w >= 1`, along the
/// contour `u = w + i s`, where the integrand decays like `e^{-s}`.
fn pareto_upper_integral(alpha: f64, w: f64) -> Complex64 {
    let nodes = crate::quadrature::gauss_legendre(16);
    let width = w.min(8.0);
    let s_max = 40.0;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut lo = 0.0;
    while lo < s_max {
        let hi = (lo + width).min(s_max);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, wt) in nodes.iter() {
            let s = mid + half * x;
            let u = Complex64::new(w, s);
            acc += (u.ln() * (-alpha - 1.0)).exp() * (-s).exp() * (wt * half);
        }
        lo = hi;
    }
    I * Complex64::from_polar(1.0, w) * acc
}

/// `E[exp(i w Y)] - 1` for `Y ~ Pareto(alpha, 1)`.
fn pareto_char_fn_minus_one(alpha: f64, w: f64) -> Complex64 {
    if w == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if w < 0.0 {
        return pareto_char_fn_minus_one(alpha, -w).conj();
    }
    if w > 1.0 {
        return pareto_upper_integral(alpha, w) * (alpha * w.powf(alpha)) - 1.0;
    }
    // alpha w^alpha [ int_w^1 u^(-alpha-1) (e^{iu} - 1) du + K ],
    // K = int_1^inf u^(-alpha-1) (e^{iu} - 1) du.
    let k_const = pareto_upper_integral(alpha, 1.0) - 1.0 / alpha;
    let lw = w.ln();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut i_pow = Complex64::new(1.0, 0.0);
    let mut fact = 1.0;
    for n in 1..60u32 {
        i_pow *= I;
        fact *= n as f64;
        let nf = n as f64;
        let gap = alpha - nf;
        // w^alpha int_w^1 u^(n-alpha-1) du
        let t = if gap.abs() < 1e-12 {
            -w.powi(n as i32) * lw
        } else {
            -w.powi(n as i32) * (gap * lw).exp_m1() / gap
        };
        let term = i_pow * (t / fact);
        acc += term;
        if nf > alpha + 2.0 && term.norm() < 1e-18 {
            break;
        }
    }
    (acc + k_const * w.powf(alpha)) * alpha
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use approx::assert_abs_diff_eq;

    fn discrete_specs() -> Vec<DistributionSpec> {
        vec![
            DistributionSpec::poisson(0.5).unwrap(),
            DistributionSpec::poisson(5.0).unwrap(),
            DistributionSpec::geometric(0.3, SupportStart::Zero).unwrap(),
            DistributionSpec::geometric(0.3, SupportStart::One).unwrap(),
            DistributionSpec::negative_binomial(0.06, 0.1).unwrap(),
            DistributionSpec::negative_binomial(2.7, 0.5).unwrap(),
            DistributionSpec::negative_binomial(10.0, 0.9).unwrap(),
        ]
    }

    #[test]
    fn pmf_examples() {
        let p = DistributionSpec::poisson(1.0).unwrap();
        assert_abs_diff_eq!(p.pmf(0).unwrap(), (-1.0f64).exp(), epsilon = 1e-15);
        let nb = DistributionSpec::negative_binomial(1.0, 0.5).unwrap();
        assert_abs_diff_eq!(nb.pmf(2).unwrap(), 0.125, epsilon = 1e-15);
        // Gamma(1.5) / (Gamma(2) Gamma(0.5)) * 0.5^0.5 * 0.5 = 0.25 / sqrt(2)
        let half = DistributionSpec::negative_binomial(0.5, 0.5).unwrap();
        assert_abs_diff_eq!(half.pmf(1).unwrap(), 0.25 / 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn pmf_of_continuous_is_unsupported() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert!(matches!(e.pmf(0), Err(GiniError::Unsupported { .. })));
        let p = DistributionSpec::poisson(1.0).unwrap();
        assert!(matches!(p.pdf(0.0), Err(GiniError::Unsupported { .. })));
    }

    #[test]
    fn pdf_examples() {
        assert_eq!(DistributionSpec::pareto(2.0, 1.0).unwrap().pdf(1.0).unwrap(), 2.0);
        assert_eq!(DistributionSpec::uniform(0.0, 2.0).unwrap().pdf(1.0).unwrap(), 0.5);
        assert_eq!(DistributionSpec::exponential(1.0).unwrap().pdf(0.0).unwrap(), 1.0);
    }

    #[test]
    fn pdf_integrates_to_one() {
        let nodes = crate::quadrature::gauss_legendre(32);
        let gl = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> f64 {
            let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            nodes.iter().map(|(x, w)| w * h * f(m + h * x)).sum()
        };
        let u = DistributionSpec::uniform(1.0, 3.0).unwrap();
        assert_abs_diff_eq!(gl(&|x| u.pdf(x).unwrap(), 1.0, 3.0), 1.0, epsilon = 1e-14);
        let e = DistributionSpec::exponential(2.0).unwrap();
        let total: f64 = (0..40)
            .map(|i| gl(&|x| e.pdf(x).unwrap(), i as f64, i as f64 + 1.0))
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
        // Pareto: substitute x = x_m / t on (0, 1]
        let p = DistributionSpec::pareto(3.0, 2.0).unwrap();
        let mapped = gl(&|t| p.pdf(2.0 / t).unwrap() * 2.0 / (t * t), 0.0, 1.0);
        assert_abs_diff_eq!(mapped, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn tail_examples() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert_abs_diff_eq!(e.tail(2f64.ln()), 0.5, epsilon = 1e-15);
        let g = DistributionSpec::geometric(0.3, SupportStart::Zero).unwrap();
        for j in 0..10 {
            assert_abs_diff_eq!(g.tail(j as f64), 0.7f64.powi(j + 1), epsilon = 1e-15);
        }
        let p = DistributionSpec::pareto(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.tail(2.0), 0.25, epsilon = 1e-15);
        assert_eq!(g.tail(-0.5), 1.0);
    }

    #[test]
    fn mean_examples() {
        assert_eq!(DistributionSpec::negative_binomial(2.0, 0.5).unwrap().mean(), 2.0);
        assert_eq!(DistributionSpec::pareto(2.0, 1.0).unwrap().mean(), 2.0);
        assert_eq!(DistributionSpec::uniform(1.0, 3.0).unwrap().mean(), 2.0);
    }

    #[test]
    fn char_fn_examples() {
        for d in discrete_specs() {
            let v = d.char_fn(0.0);
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        }
        let p = DistributionSpec::poisson(1.0).unwrap().char_fn(PI);
        assert_abs_diff_eq!(p.re, (-2.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.im, 0.0, epsilon = 1e-15);
        let nb = DistributionSpec::negative_binomial(1.0, 0.5).unwrap().char_fn(PI);
        assert_abs_diff_eq!(nb.re, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(nb.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn char_fn_matches_direct_sums() {
        for d in discrete_specs() {
            for &theta in &[0.3, 1.0, 2.5, -1.2] {
                let mut direct = Complex64::new(0.0, 0.0);
                for j in 0..20_000u64 {
                    direct += Complex64::from_polar(d.pmf(j).unwrap(), theta * j as f64);
                }
                assert!((d.char_fn(theta) - direct).norm() < 1e-10, "{d} at {theta}");
            }
        }
    }

    #[test]
    fn continuous_char_fn_matches_quadrature() {
        let nodes = crate::quadrature::gauss_legendre(16);
        let specs = [
            DistributionSpec::exponential(1.5).unwrap(),
            DistributionSpec::uniform(0.5, 2.0).unwrap(),
            DistributionSpec::pareto(3.0, 1.0).unwrap(),
            DistributionSpec::pareto(1.5, 2.0).unwrap(),
        ];
        for d in specs {
            let (lo, upper) = match d {
                DistributionSpec::Pareto { x_m, .. } => (x_m, 3000.0),
                DistributionSpec::UniformContinuous { a, b } => (a, b),
                _ => (0.0, 40.0),
            };
            for &theta in &[0.2, 0.9, 1.0, 1.1, 3.0] {
                let n_panels = ((upper - lo) / 0.25).ceil() as usize;
                let h = (upper - lo) / n_panels as f64;
                let mut direct = Complex64::new(0.0, 0.0);
                for i in 0..n_panels {
                    let (m, hh) = (lo + (i as f64 + 0.5) * h, 0.5 * h);
                    for (x, w) in nodes.iter() {
                        let s = m + hh * x;
                        direct += Complex64::from_polar(d.pdf(s).unwrap() * w * hh, theta * s);
                    }
                }
                if let DistributionSpec::Pareto { alpha, .. } = d {
                    // int_X^inf f e^{i t x} = -e^{i t X} [f/(it) - f'/(it)^2 + f''/(it)^3]
                    let f0 = d.pdf(upper).unwrap();
                    let f1 = -(alpha + 1.0) * f0 / upper;
                    let f2 = (alpha + 1.0) * (alpha + 2.0) * f0 / (upper * upper);
                    let it = I * theta;
                    let corr =
                        -Complex64::from_polar(1.0, theta * upper) * (f0 / it - f1 / (it * it) + f2 / (it * it * it));
                    direct += corr;
                }
                let cf = d.char_fn(theta);
                assert!((cf - direct).norm() < 1e-11, "{d} at {theta}: {cf} vs {direct}");
            }
        }
    }

    #[test]
    fn pareto_branches_agree_at_switch() {
        for &alpha in &[1.5, 2.0, 3.0, 2.5] {
            let lo = pareto_char_fn_minus_one(alpha, 1.0 - 1e-9);
            let hi = pareto_char_fn_minus_one(alpha, 1.0 + 1e-9);
            assert!((lo - hi).norm() < 1e-8, "alpha {alpha}: {lo} vs {hi}");
        }
    }

    #[test]
    fn char_fn_minus_one_small_theta() {
        for d in discrete_specs().into_iter().chain([
            DistributionSpec::exponential(2.0).unwrap(),
            DistributionSpec::uniform(0.0, 1.0).unwrap(),
            DistributionSpec::pareto(3.0, 1.0).unwrap(),
        ]) {
            let theta = 1e-7;
            let v = d.char_fn_minus_one(theta);
            // leading term i theta E[X]
            assert!((v.im / (theta * d.mean()) - 1.0).abs() < 1e-5, "{d}: {v}");
        }
    }

    #[test]
    fn excess_tail_examples() {
        let e = DistributionSpec::exponential(0.7).unwrap();
        for &x in &[0.0, 0.3, 2.0, 10.0] {
            assert_abs_diff_eq!(e.excess_tail(x), e.tail(x), epsilon = 1e-15);
        }
        let p = DistributionSpec::pareto(3.0, 2.0).unwrap();
        for &x in &[2.0, 3.0, 50.0] {
            assert_abs_diff_eq!(p.excess_tail(x), (2.0f64 / x).powf(2.0) / 3.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(p.excess_tail(0.0), 1.0);
        // continuous from the left at x_m
        assert_abs_diff_eq!(p.excess_tail(2.0 - 1e-12), p.excess_tail(2.0), epsilon = 1e-11);
        let g = DistributionSpec::geometric(0.4, SupportStart::Zero).unwrap();
        for j in 0..15 {
            assert_abs_diff_eq!(g.excess_tail_discrete(j), 0.6f64.powi(j as i32), epsilon = 1e-15);
        }
    }

    #[test]
    fn uniform_excess_tail_is_continuous() {
        let u = DistributionSpec::uniform(1.0, 3.0).unwrap();
        assert_abs_diff_eq!(u.excess_tail(0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u.excess_tail(1.0 - 1e-12), u.excess_tail(1.0), epsilon = 1e-11);
        assert_eq!(u.excess_tail(3.0), 0.0);
    }

    #[test]
    fn pmf_plus_tail_is_one() {
        for d in discrete_specs() {
            let mut cdf = Kahan::default();
            for j in 0..200u64 {
                cdf.add(d.pmf(j).unwrap());
                let s = cdf.sum() + d.tail(j as f64);
                assert!((s - 1.0).abs() < 1e-12, "{d} at {j}: {s}");
            }
        }
    }

    #[test]
    fn discrete_excess_differences_are_tail_over_mean() {
        for d in discrete_specs() {
            for j in 0..60u64 {
                let lhs = d.excess_tail_discrete(j) - d.excess_tail_discrete(j + 1);
                let rhs = d.tail(j as f64) / d.mean();
                assert!((lhs - rhs).abs() < 1e-12, "{d} at {j}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn continuous_excess_of_discrete_law_interpolates() {
        let d = DistributionSpec::poisson(2.0).unwrap();
        for j in 0..10u64 {
            assert_abs_diff_eq!(d.excess_tail(j as f64), d.excess_tail_discrete(j), epsilon = 1e-13);
        }
    }

    #[test]
    fn nb_one_is_geometric() {
        for &p in &[0.1, 0.5, 0.9] {
            let nb = DistributionSpec::negative_binomial(1.0, p).unwrap();
            let g = DistributionSpec::geometric(p, SupportStart::Zero).unwrap();
            for j in 0..50u64 {
                assert!((nb.pmf(j).unwrap() - g.pmf(j).unwrap()).abs() < 1e-12);
                assert!((nb.tail(j as f64) - g.tail(j as f64)).abs() < 1e-12);
            }
            for &t in &[0.1, 1.0, 3.0] {
                assert!((nb.char_fn(t) - g.char_fn(t)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn shifted_geometric_moments() {
        let g = DistributionSpec::geometric(0.25, SupportStart::One).unwrap();
        assert_abs_diff_eq!(g.raw_moment(1).unwrap(), 4.0, epsilon = 1e-12);
        // Var = q / p^2 = 12, so E[Y^2] = 28
        assert_abs_diff_eq!(g.raw_moment(2).unwrap(), 28.0, epsilon = 1e-12);
        assert!(DistributionSpec::pareto(2.0, 1.0).unwrap().raw_moment(2).is_none());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(DistributionSpec::poisson(0.0).is_err());
        assert!(DistributionSpec::geometric(1.0, SupportStart::Zero).is_err());
        assert!(DistributionSpec::negative_binomial(-1.0, 0.5).is_err());
        assert!(DistributionSpec::pareto(1.0, 1.0).is_err());
        assert!(DistributionSpec::uniform(2.0, 1.0).is_err());
        assert!(DistributionSpec::uniform(-1.0, 1.0).is_err());
        assert!(DistributionSpec::exponential(f64::NAN).is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let d = DistributionSpec::negative_binomial(0.3, 0.2).unwrap();
        assert_eq!(d.sample(7, 100).unwrap(), d.sample(7, 100).unwrap());
        assert_ne!(d.sample(7, 100).unwrap(), d.sample(8, 100).unwrap());
        assert!(d.sample(1, 0).is_err());
    }
}
