//! Complex helpers that keep relative accuracy near the origin.

use num_complex::Complex64;

/// Complex number used for characteristic functions and Fourier integrands.
pub type ComplexValue = Complex64;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    // e^x cos y - 1 = expm1(x) cos y - 2 sin^2(y/2)
    let re = z.re.exp_m1() * c - 2.0 * half * half;
    let im = z.re.exp() * s;
    Complex64::new(re, im)
}

/// `ln(1 + z)` (principal branch) without cancellation for small `|z|`.
pub fn ln_1p(z: Complex64) -> Complex64 {
    // |1+z|^2 = 1 + (2x + x^2 + y^2)
    let t = z.re * (2.0 + z.re) + z.im * z.im;
    Complex64::new(0.5 * t.ln_1p(), z.im.atan2(1.0 + z.re))
}

/// `e^{i theta} - 1`, accurate for small `theta`.
pub fn cis_minus_one(theta: f64) -> Complex64 {
    let h = (0.5 * theta).sin();
    Complex64::new(-2.0 * h * h, theta.sin())
}

/// `1 - cos(theta)` computed as `2 sin^2(theta / 2)`.
pub fn one_minus_cos(theta: f64) -> f64 {
    let h = (0.5 * theta).sin();
    2.0 * h * h
}
