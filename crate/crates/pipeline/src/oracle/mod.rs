//! Reference solvers used to certify gold answers.
//!
//! None of these share code with the engine or its constraint solvers; each
//! has its own parser and evaluator so agreement is meaningful.

pub mod cinema;
pub mod csp;
mod expr;
pub mod linear;
pub mod navigate;
pub mod sumitup;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("search space of {size} assignments exceeds the limit of {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-linear term: {0}")]
    NonLinear(String),
    #[error("system is singular")]
    Singular,
    #[error("system is inconsistent")]
    Inconsistent,
    #[error("no 0 square left for waitlist number in round {round}")]
    NoZeroSquare { round: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("unknown instruction: {0}")]
    UnknownInstruction(String),
}
