use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = GiniError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GiniError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{operation} is not supported for {distribution}")]
    Unsupported {
        operation: &'static str,
        distribution: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge (last estimate {last_estimate:e}, error estimate {error_estimate:e})")]
    NonConvergence {
        what: &'static str,
        last_estimate: f64,
        error_estimate: f64,
    },

    #[error("imaginary residual {residual:e} exceeds {threshold:e} (real part {value})")]
    ImaginaryResidual { value: f64, residual: f64, threshold: f64 },

    #[error("value {value} lies outside [0, 1] by more than its error estimate {error_estimate:e}")]
    OutOfRange { value: f64, error_estimate: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
