//! Tokenizer and operator-precedence parser for the Prolog subset used by
//! generated programs.

pub mod lexer;
mod parser;

pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{
    flatten_conjunction, parse_program, parse_program_with, parse_query, parse_query_with, parse_term, read_term,
    Program, Query,
};
