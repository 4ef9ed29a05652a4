use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid feasible set: {0}")]
    InvalidSet(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("tolerance not reached: gap {gap:e} > tol {tol:e} after {iterations} iterations")]
    ToleranceNotReached { gap: f64, tol: f64, iterations: usize },

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("rate fit: {0}")]
    RateFit(String),

    #[error("reference optimum not trusted: runs disagree by {0:e}")]
    ReferenceDisagreement(f64),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn at(self, iteration: usize) -> Self {
        Error::AtIteration {
            iteration,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
