use thiserror::Error;

/// Errors raised by the bath, state, distribution and separability routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{quantity} diverges for this bath model: {reason}")]
    Divergent {
        quantity: &'static str,
        reason: String,
    },

    #[error("unsupported for this bath model: {0}")]
    UnsupportedModel(String),

    #[error(
        "quadrature did not converge: value {value:e}, error estimate {error_estimate:e}, \
         requested tolerance {requested:e} ({detail})"
    )]
    QuadratureNonConvergence {
        value: f64,
        error_estimate: f64,
        requested: f64,
        detail: String,
    },

    #[error("invalid bracket: f({lo}) = {f_lo:e} and f({hi}) = {f_hi:e} share a sign")]
    InvalidBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("covariance is degenerate: A11*A22 - A12^2 - hbar^2/4 = {excess:e}")]
    DegenerateCovariance { excess: f64 },

    #[error("initial criterion C(0) = {0} is not negative; the initial state must be entangled")]
    InconsistentInitialState(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be finite, got {value}")))
    }
}
