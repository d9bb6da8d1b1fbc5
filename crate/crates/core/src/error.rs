use thiserror::Error;

use crate::rat::{fmt_rat, Rat};

#[derive(Debug, Error)]
pub enum Error {
    #[error("delta too small: need delta > {}, got {}", fmt_rat(.bound), fmt_rat(.delta))]
    DeltaTooSmall { delta: Box<Rat>, bound: Box<Rat> },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} exceeded its cap of {cap}")]
    CapExceeded { what: &'static str, cap: u64 },

    #[error("element is not in the field: {0}")]
    NotInField(String),

    #[error("divisor classes live on different surfaces ({0} vs {1} points)")]
    SurfaceMismatch(usize, usize),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code for the command-line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DeltaTooSmall { .. }
            | Error::InvalidInput(_)
            | Error::Precondition(_)
            | Error::SurfaceMismatch(..) => 2,
            Error::CapExceeded { .. } => 3,
            Error::NotInField(_) | Error::Internal(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
