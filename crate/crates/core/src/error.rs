use thiserror::Error;

use crate::grid_model::Violation;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid network: {}", join(.0))]
    InvalidNetwork(Vec<Violation>),
    #[error("unknown {kind} `{id}`")]
    UnknownId { kind: &'static str, id: String },
    #[error("invalid scenario set: {0}")]
    InvalidScenarios(String),
    #[error("non-cumulative indicators for substation `{substation}` in scenario `{scenario}`")]
    NonCumulative { scenario: String, substation: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("plan enumeration needs {0} candidates, above the 10^7 guard")]
    EnumerationTooLarge(u128),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error(transparent)]
    Milp(#[from] floodwall_milp::MilpError),
    #[error("i/o error on `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error in `{path}`: {message}")]
    Parse { path: String, message: String },
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, CoreError>;
