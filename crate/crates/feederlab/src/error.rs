//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed a domain invariant. The message names the parameter.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The operation has a closed form only for Pareto potentials.
    #[error("{0} requires a Pareto potential law")]
    RequiresPareto(&'static str),

    /// A data record failed validation; `row` is 1-based and counts the
    /// header as row 1.
    #[error("row {row}: {message}")]
    InvalidRecord { row: usize, message: String },

    /// A statistic could not be computed from the given sample.
    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Exit code the CLI maps this error to: 2 for argument/domain errors,
    /// 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. }
            | Error::RequiresPareto(_)
            | Error::InvalidRecord { .. }
            | Error::DegenerateSample(_) => 2,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}
