use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("zero denominator")]
    ZeroDenominator,
}

/// Line/column in source text, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("lex error at {pos}: {message}")]
    Lex { pos: Pos, message: String },
    #[error("parse error at {pos}: expected {expected}")]
    Parse { pos: Pos, expected: String },
    #[error("operator clash at {pos}: {message}")]
    OperatorClash { pos: Pos, message: String },
}

impl SyntaxError {
    pub fn pos(&self) -> Pos {
        match self {
            SyntaxError::Lex { pos, .. } | SyntaxError::Parse { pos, .. } | SyntaxError::OperatorClash { pos, .. } => {
                *pos
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BudgetKind {
    Steps,
    Time,
}

impl fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BudgetKind::Steps => f.write_str("steps"),
            BudgetKind::Time => f.write_str("time"),
        }
    }
}

/// Errors raised while solving a query.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("existence error: unknown procedure {name}/{arity}")]
    Existence { name: String, arity: usize },
    #[error("instantiation error in {0}")]
    Instantiation(String),
    #[error("type error: expected {expected}, found {culprit}")]
    Type { expected: String, culprit: String },
    #[error("evaluation error: zero divisor")]
    ZeroDivisor,
    #[error("budget exceeded ({0})")]
    BudgetExceeded(BudgetKind),
    #[error("permission error: cannot redefine builtin {name}/{arity}")]
    BuiltinRedefinition { name: String, arity: usize },
    #[error("non-linear constraint unsupported: {0}")]
    NonLinearUnsupported(String),
    #[error("variable used by both the finite-domain and rational solvers: {0}")]
    TypeMix(String),
    #[error("cannot label variable with unbounded domain")]
    UnboundedDomain,
    #[error("too many inequality rows (cap {0})")]
    IneqCapExceeded(usize),
    #[error("representation error: {0}")]
    Representation(String),
    #[error("domain error: {0}")]
    Domain(String),
}

impl EngineError {
    pub fn type_error(expected: &str, culprit: impl fmt::Display) -> EngineError {
        EngineError::Type {
            expected: expected.to_owned(),
            culprit: culprit.to_string(),
        }
    }

    /// Short class name used in diagnostics and transcripts.
    pub fn class(&self) -> &'static str {
        match self {
            EngineError::Existence { .. } => "existence_error",
            EngineError::Instantiation(_) => "instantiation_error",
            EngineError::Type { .. } => "type_error",
            EngineError::ZeroDivisor => "evaluation_error",
            EngineError::BudgetExceeded(_) => "budget_exceeded",
            EngineError::BuiltinRedefinition { .. } => "permission_error",
            EngineError::NonLinearUnsupported(_) => "nonlinear_unsupported",
            EngineError::TypeMix(_) => "type_mix",
            EngineError::UnboundedDomain => "unbounded_domain",
            EngineError::IneqCapExceeded(_) => "ineq_cap_exceeded",
            EngineError::Representation(_) => "representation_error",
            EngineError::Domain(_) => "domain_error",
        }
    }
}
