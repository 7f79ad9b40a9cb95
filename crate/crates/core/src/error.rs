use thiserror::Error;

/// Errors raised by bracket evaluation, parameter validation and the
/// partition-function evaluators.
///
/// Pole-type variants carry the name of the offending bracket argument so
/// that callers (and the CLI) can report which guard fired.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("theta series did not converge within {max_terms} terms")]
    SeriesDivergence { max_terms: usize },

    #[error("size limit: {what} supports L <= {limit}, got {got}")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("dynamical pole: |[{0}]| below guard")]
    DynamicalPole(String),

    #[error("boundary pole: |[{0}]| below guard")]
    BoundaryPole(String),

    #[error("reflection pole: |[{0}]| below guard")]
    ReflectionPole(String),

    #[error("generic-position violation: |[{0}]| below guard")]
    GenericPositionViolation(String),

    #[error("pole at evaluation point: |[{0}]| below guard")]
    PoleAtEvaluation(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
