use thiserror::Error;

/// Errors raised by model construction, evaluation and sampling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not positive semidefinite")]
    NotPsd,

    #[error("matrix is singular or ill-conditioned (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("logarithm argument {re} + {im}i has non-positive real part")]
    Branch { re: f64, im: f64 },

    #[error("quadrature did not converge (estimated error {estimate:e}, target {target:e})")]
    Quadrature { estimate: f64, target: f64 },

    #[error("spec document: {0}")]
    Document(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Whether this error stems from a numerical guard rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Branch { .. } | Error::Quadrature { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
