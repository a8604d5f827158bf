use alloc::boxed::Box;
use alloc::string::String;

/// Errors raised by the certification library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("interval domain violation: {0}")]
    Domain(&'static str),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("singular matrix (pivot {0})")]
    Singular(usize),

    #[error("mismatched spaces: {0}")]
    Mismatch(String),

    #[error("quadrature with {have} points cannot integrate degree {degree} exactly (need {need})")]
    QuadratureTooLow {
        have: usize,
        need: usize,
        degree: usize,
    },

    #[error("no C_h table entry for N = {0}")]
    TableMiss(usize),

    #[error("did not converge: {0}")]
    NoConvergence(String),

    #[error("refinement failed: {0}")]
    Refinement(String),

    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps `self` with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost stage name, if any.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, source } => source.stage().or(Some(stage)),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
