use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the domain where the formula is physical or defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exact integer result does not fit the return type.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A numerical procedure could not meet the requested accuracy.
    #[error("tolerance not met for {quantity}: estimate {estimate:e} exceeds {tolerance:e}")]
    Tolerance {
        quantity: String,
        estimate: f64,
        tolerance: f64,
    },

    /// Iterative eigensolver failed.
    #[error("eigensolver did not converge: residual {residual:e}")]
    NoConvergence { residual: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn tolerance(quantity: impl Into<String>, estimate: f64, tolerance: f64) -> Self {
        Error::Tolerance {
            quantity: quantity.into(),
            estimate,
            tolerance,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
