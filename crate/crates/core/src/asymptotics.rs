//! Small-k and large-k behaviour of the negative-binomial Gini coefficient.
//!
//! The negative binomial is parameterised here through the Gamma rate
//! `lambda = p / (1 - p)`, since `NB(k, p)` is a Poisson count whose
//! intensity is `Gamma(k, lambda)`.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::gini::{GiniMethod, GiniResult};
use crate::{DistributionSpec, GiniError, Result};

pub fn lambda_from_p(p: f64) -> f64 {
    p / (1.0 - p)
}

pub fn p_from_lambda(lambda: f64) -> f64 {
    lambda / (lambda + 1.0)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(GiniError::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must be a positive finite number",
        })
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(GiniError::InvalidParameter {
            name: "p",
            value: p,
            reason: "must lie strictly between 0 and 1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticConstants {
    pub lambda: f64,
    /// `c` in `G = 1 + c k + o(k)`.
    pub small_k_slope_c: f64,
    /// Limit of `sqrt(k) G` as `k -> inf`.
    pub large_k_limit: f64,
    /// Scale of the normal limit of `(X_k - k / lambda) / sqrt(k)`.
    pub sigma: f64,
}

impl AsymptoticConstants {
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self {
            lambda,
            small_k_slope_c: slope_from_lambda(lambda),
            large_k_limit: ((1.0 + lambda) / PI).sqrt(),
            sigma: (1.0 + lambda).sqrt() / lambda,
        })
    }

    pub fn from_p(p: f64) -> Result<Self> {
        check_p(p)?;
        Self::from_lambda(lambda_from_p(p))
    }
}

fn slope_from_lambda(lambda: f64) -> f64 {
    // 2 ln(lambda / (lambda + 1)) - (lambda + 2) ln((lambda^2 + 2 lambda) / (lambda + 1)^2)
    let r = 1.0 / (lambda + 1.0);
    2.0 * (-(1.0 / lambda).ln_1p()) - (lambda + 2.0) * (-r * r).ln_1p()
}

/// Slope `c` of `G(NB(k, p)) = 1 + c k + o(k)`.
pub fn small_k_slope(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(slope_from_lambda(lambda_from_p(p)))
}

/// The same slope written in `p`: `2 ln p - ((2 - p) / (1 - p)) ln(p (2 - p))`.
pub fn small_k_slope_p_form(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(2.0 * p.ln() - (2.0 - p) / (1.0 - p) * (p * (2.0 - p)).ln())
}

/// `1 + c k`. The truncation error of the expansion is not estimated, so
/// `abs_error_estimate` is zero; values outside `[0, 1]` are flagged, not
/// clamped.
pub fn gini_small_k(k: f64, p: f64) -> Result<GiniResult> {
    DistributionSpec::negative_binomial(k, p)?;
    let c = small_k_slope(p)?;
    let value = 1.0 + c * k;
    let mut r = GiniResult::new(value, GiniMethod::AsymptoticSmallK, 0.0);
    r.out_of_domain = !(0.0..=1.0).contains(&value);
    Ok(r)
}

/// `sqrt((1 + lambda) / pi) / sqrt(k)`.
pub fn gini_large_k(k: f64, lambda: f64) -> Result<GiniResult> {
    check_lambda(lambda)?;
    DistributionSpec::negative_binomial(k, p_from_lambda(lambda))?;
    let value = ((1.0 + lambda) / PI).sqrt() / k.sqrt();
    let mut r = GiniResult::new(value, GiniMethod::AsymptoticLargeK, 0.0);
    r.out_of_domain = value > 1.0;
    Ok(r)
}

fn check_index(j: u64) -> Result<()> {
    if j == 0 {
        Err(GiniError::InvalidParameter {
            name: "j",
            value: 0.0,
            reason: "index starts at 1",
        })
    } else {
        Ok(())
    }
}

/// `c_j = 1 / (j (lambda + 1)^j)`, the first-order coefficient of `P(X_k = j)`.
pub fn appendix_c_j(j: u64, lambda: f64) -> Result<f64> {
    check_index(j)?;
    check_lambda(lambda)?;
    Ok((-(j as f64) * lambda.ln_1p()).exp() / j as f64)
}

/// `d*_j = r^j - j lambda sum_{n >= j} r^{n+1} / (n + 1)` with `r = 1/(lambda+1)`.
pub fn appendix_d_star_j(j: u64, lambda: f64) -> Result<f64> {
    check_index(j)?;
    check_lambda(lambda)?;
    let r = 1.0 / (lambda + 1.0);
    let mut power = r.powi(j as i32 + 1);
    let mut sum = 0.0;
    let mut n = j;
    loop {
        sum += power / (n + 1) as f64;
        // geometric bound on the remaining terms
        if power / (1.0 - r) < 1e-14 || power == 0.0 {
            break;
        }
        power *= r;
        n += 1;
    }
    Ok(r.powi(j as i32) - j as f64 * lambda * sum)
}

/// `sum_j c_j d*_j - ln((lambda + 1) / lambda)`, which equals the small-k
/// slope. Returns the value and a bound on the truncated terms.
pub fn slope_identity(lambda: f64) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    let r = 1.0 / (lambda + 1.0);
    let mut acc = crate::distributions::Kahan::default();
    let mut j = 1u64;
    loop {
        acc.add(appendix_c_j(j, lambda)? * appendix_d_star_j(j, lambda)?);
        // c_j d*_j <= r^j / j, so the rest is below r^{j+1} / ((j + 1)(1 - r))
        let bound = r.powi(j as i32 + 1) / ((j + 1) as f64 * (1.0 - r));
        if bound < 1e-16 {
            return Ok((acc.sum() - (1.0 / lambda).ln_1p(), bound));
        }
        j += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PmfCheck {
    pub approx: f64,
    pub exact: f64,
    /// `|exact - approx| / k`.
    pub remainder: f64,
}

/// First-order small-k approximation of `P(X_k = j)` next to the exact mass.
pub fn small_k_pmf_check(j: u64, k: f64, lambda: f64) -> Result<PmfCheck> {
    check_lambda(lambda)?;
    let spec = DistributionSpec::negative_binomial(k, p_from_lambda(lambda))?;
    let approx = if j == 0 {
        1.0 - k * (1.0 / lambda).ln_1p()
    } else {
        appendix_c_j(j, lambda)? * k
    };
    let exact = spec.pmf(j)?;
    Ok(PmfCheck {
        approx,
        exact,
        remainder: (exact - approx).abs() / k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CltSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    /// Kolmogorov-Smirnov distance to the standard normal.
    pub ks: f64,
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Samples `X_k ~ NB(k, lambda / (lambda + 1))` and summarises
/// `z = (X_k - k / lambda) / (sigma sqrt(k))` against `N(0, 1)`.
///
/// `z` lives on a lattice of spacing `h = 1 / (sigma sqrt(k))`; the KS
/// distance treats each lattice point as spread over `[z - h/2, z + h/2]`.
pub fn clt_normalization_check(k: f64, lambda: f64, n_samples: usize, seed: u64) -> Result<CltSummary> {
    if n_samples == 0 {
        return Err(GiniError::Empty("no samples requested for the normal-limit check"));
    }
    if !(k >= 100.0) {
        return Err(GiniError::InvalidParameter {
            name: "k",
            value: k,
            reason: "the normal-limit check needs k >= 100",
        });
    }
    let consts = AsymptoticConstants::from_lambda(lambda)?;
    let spec = DistributionSpec::negative_binomial(k, p_from_lambda(lambda))?;
    let scale = consts.sigma * k.sqrt();
    let centre = k / lambda;
    let mut z: Vec<f64> = spec
        .sample(seed, n_samples)?
        .into_iter()
        .map(|x| (x - centre) / scale)
        .collect();
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let variance = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    z.sort_by(f64::total_cmp);
    let h = 1.0 / scale;
    let mut ks = 0.0f64;
    let mut i = 0;
    while i < z.len() {
        let v = z[i];
        let mut end = i;
        while end < z.len() && z[end] == v {
            end += 1;
        }
        let below = i as f64 / n;
        let upto = end as f64 / n;
        ks = ks
            .max((upto - std_normal_cdf(v + 0.5 * h)).abs())
            .max((below - std_normal_cdf(v - 0.5 * h)).abs());
        i = end;
    }
    Ok(CltSummary {
        n: z.len(),
        mean,
        variance,
        ks,
    })
}
