//! Concrete syntax: lexer, parser and pretty-printer.
//!
//! ```text
//! type    ::= `1` | `[` type `]` | type `->` type | `(` type `)`
//! term    ::= `\` ident (`:` type)? `.` term
//!           | `catch` ident `.` term
//!           | `throw` ident term
//!           | atom+
//! atom    ::= `()` | `[]` | `cons` | `lrec` | ident | `#` digits
//!           | `[` term (`,` term)* `]` | `(` term (`:` type)? `)`
//! program ::= (`def` ident `=` term `;`)* (`main` `=` term `;`)?
//! ```
//!
//! Application is left-associative. Binder forms extend as far right as
//! possible. `--` starts a line comment.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

use crate::syntax::{subst, Term};

pub use parser::{parse_program, parse_term, parse_type, MAX_NUMERAL};
pub use printer::{print, print_type, print_with, PrintOptions};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    /// 1-based.
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>, expected: Vec<String>) -> Self {
        ParseError { line, column, message: message.into(), expected }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// A parsed `.lc` file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceProgram {
    pub defs: Vec<(String, Term)>,
    pub main: Option<Term>,
}

impl SourceProgram {
    /// Definitions with every reference to an earlier definition substituted
    /// away. References to later or unknown names stay free.
    pub fn expanded_defs(&self) -> Vec<(String, Term)> {
        let mut done: Vec<(String, Term)> = Vec::with_capacity(self.defs.len());
        for (name, body) in &self.defs {
            let body = close_over(body, &done);
            done.push((name.clone(), body));
        }
        done
    }

    /// `t` with all definitions of this program substituted in.
    pub fn expand(&self, t: &Term) -> Term {
        close_over(t, &self.expanded_defs())
    }

    /// The expanded `main` term, if any.
    pub fn expanded_main(&self) -> Option<Term> {
        self.main.as_ref().map(|m| self.expand(m))
    }
}

/// Substitutes already-expanded definitions into `t`, latest first.
pub fn close_over(t: &Term, defs: &[(String, Term)]) -> Term {
    defs.iter().rev().fold(t.clone(), |acc, (name, body)| subst(&acc, name, body))
}

/// Parses `src` as a program.
pub fn parse(src: &str) -> Result<SourceProgram, ParseError> {
    parse_program(src)
}
