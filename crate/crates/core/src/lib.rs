//! Gini coefficients of probability distributions.
//!
//! The crate evaluates the Gini coefficient `G(X) = E|X1 - X2| / (2 E[X])`
//! through several mathematically equivalent routes: closed forms, the
//! excess (integrated-tail) variable, characteristic-function quadrature on
//! the circle and on the real line, the alternating negative-binomial series,
//! the classic pairwise sum, and Monte-Carlo simulation. Small-k and large-k
//! asymptotics for the negative binomial live in [`asymptotics`], and
//! estimation from raw samples in [`empirical`].
//!
//! ```
//! use ginikit::{gini, DistributionSpec};
//!
//! let geo = DistributionSpec::geometric(0.5, ginikit::SupportStart::Zero).unwrap();
//! let g = gini::gini_closed_form(&geo).unwrap();
//! assert!((g.value - 2.0 / 3.0).abs() < 1e-15);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod complex;
pub mod distributions;
pub mod empirical;
mod error;
pub mod gini;
pub mod quadrature;

pub use complex::ComplexValue;
pub use distributions::{DistributionSpec, SupportStart};
pub use error::{GiniError, Result};
pub use gini::{GiniMethod, GiniResult};
