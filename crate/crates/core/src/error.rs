use thiserror::Error;

use crate::zeta::ZetaSample;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The requested zeta tolerance was not reached within the cutoff
    /// budget. Carries the sample at the largest cutoff evaluated.
    #[error("cutoff budget exceeded at N = {}: tail bound {} above tolerance", .0.truncation_cutoff, .0.tail_bound)]
    BudgetExceeded(Box<ZetaSample>),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
