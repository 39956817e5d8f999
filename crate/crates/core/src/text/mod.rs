//! Concrete syntax for terms, guards, constraint files (`.mdlc`) and
//! choreography files (`.chor`).
//!
//! ```text
//! term    := IDENT | $IDENT | ^IDENT
//!          | "(" term ("," term)* ")"
//!          | "{" [elems] ["|" $IDENT] "}"
//!          | "(:" [elems] ["|" ^IDENT] ":)"
//!          | "<" guard ":" term ("," guard ":" term)* ">"
//! elem    := IDENT ["(" guard ")"] ":" term
//! guard   := or ["->" guard]
//! or      := and ("||" and)*
//! and     := unary ("&&" unary)*
//! unary   := "!" unary | "true" | "false" | IDENT | "(" guard ")"
//! mdlc    := (term "<=" term ";")*
//! chor    := ("service" IDENT "{" (("in"|"out") IDENT ":" term ";")* "}"
//!            | "channel" IDENT "." IDENT "->" IDENT "." IDENT ";")*
//! ```

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

pub use parser::{parse_chor, parse_constraints, parse_guard, parse_term};
pub use printer::{print_chor, print_constraints, print_term};

/// Position of a syntactic item: 1-based line and column (in characters),
/// byte offsets `start..end`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn to(self, end: SourceSpan) -> SourceSpan {
        SourceSpan { end: end.end, ..self }
    }
}

fn location(file: &Option<String>, span: &SourceSpan) -> String {
    match file {
        Some(f) => format!("{f}:{}:{}", span.line, span.column),
        None => format!("{}:{}", span.line, span.column),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("{}: {message}", location(.file, .span))]
    Lex { file: Option<String>, span: SourceSpan, message: String },
    #[error("{}: expected {}, found {found}", location(.file, .span), ExpectedList(.expected))]
    Parse { file: Option<String>, span: SourceSpan, expected: Vec<String>, found: String },
    #[error("{}: sort error: {message}", location(.file, .span))]
    Sort { file: Option<String>, span: SourceSpan, message: String },
}

impl TextError {
    pub fn span(&self) -> SourceSpan {
        match self {
            TextError::Lex { span, .. } | TextError::Parse { span, .. } | TextError::Sort { span, .. } => *span,
        }
    }
}

struct ExpectedList<'a>(&'a [String]);

impl fmt::Display for ExpectedList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            [] => f.write_str("nothing"),
            [one] => f.write_str(one),
            [init @ .., last] => write!(f, "one of {}, or {last}", init.join(", ")),
        }
    }
}
