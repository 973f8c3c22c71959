use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MilpError {
    #[error("constraint `{row}` references undeclared variable index {var}")]
    UnknownVariable { row: String, var: usize },
    #[error("variable `{name}` has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("non-finite coefficient in `{0}`")]
    NonFinite(String),
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("linear relaxation is unbounded")]
    Unbounded,
    #[error("numerical failure: {0}")]
    Numerical(String),
}
