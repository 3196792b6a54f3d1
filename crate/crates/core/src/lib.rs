//! A small constraint logic programming engine.
//!
//! The crate provides a reader for standard Prolog syntax, an SLD
//! resolution engine with cut and negation as failure, a finite-domain
//! integer constraint solver (`#=`, `#\=`, `in`, `label`, ...) and an
//! exact rational linear solver reached through `{...}` constraint blocks.

pub mod arith;
pub mod clpr;
pub mod engine;
pub mod error;
pub mod fd;
pub mod ops;
pub mod reader;
pub mod term;
pub mod write;

pub use engine::{consult, Budget, Database, Machine, Solution, Solutions};
pub use error::{EngineError, SyntaxError};
pub use reader::{parse_program, parse_query, read_term, Program, Query};
pub use term::{Bindings, Clause, Number, Sym, Term, VarId};
