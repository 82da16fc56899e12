use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("no sign change bracketing a root in interval {index}")]
    Bracket { index: usize },

    #[error("root finder exhausted its iteration budget near {last:.17e}")]
    RootIterations { last: f64 },

    #[error("{value} is not a root stored in the mode table")]
    UnknownRoot { value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("kernel violates the first-order symmetry conditions (violation {violation:.3e})")]
    AsymmetricKernel { violation: f64 },

    #[error("covariance matrix is not symmetric (violation {violation:.3e})")]
    NonSymmetricState { violation: f64 },

    #[error("truncation did not converge: ratio {ratio:.3e} after raising the cutoff to {cutoff}")]
    Truncation { ratio: f64, cutoff: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
