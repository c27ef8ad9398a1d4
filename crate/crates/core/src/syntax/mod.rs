//! The `.ssn` surface language and the `.trace` format.

mod ast;
mod lexer;
mod parser;
mod printer;
mod trace;

use std::fmt;

pub use ast::*;
pub use lexer::{is_keyword, quote, KEYWORDS};
pub use parser::parse;
pub use printer::{print, print_ref, print_type, protocol_header, stmt_summary};
pub use trace::{parse_trace, parse_value, Binding, Trace};

use crate::model::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.col, self.message)
    }
}

impl std::error::Error for ParseError {}
