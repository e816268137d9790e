use thiserror::Error;

use crate::asg::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("field elements belong to different fields")]
    MixedContexts,
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
    #[error("degenerate register state: {0}")]
    DegenerateState(String),
    #[error("invalid parameters or key: {}", join_violations(.0))]
    Validation(Vec<Violation>),
    #[error("invalid attack configuration: {0}")]
    Config(String),
    #[error("no decimation exponent reproduces the observed stream")]
    NotFound,
    #[error("malformed input: {0}")]
    Format(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
