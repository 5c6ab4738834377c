//! Numerals and the bundled prelude of derived programs.

use thiserror::Error;

use crate::surface::{parse_program, parse_type, SourceProgram};
use crate::syntax::{Term, Type};
use crate::typing::{check, TypingEnv};

/// Source of the bundled prelude.
pub const PRELUDE_SRC: &str = include_str!("prelude.lc");

/// Declared types of the prelude definitions.
const DECLARED: [(&str, &str); 5] = [
    ("nrec", "[1] -> ([1] -> [1] -> [1]) -> [1] -> [1]"),
    ("pred", "[1] -> [1]"),
    ("plus", "[1] -> [1] -> [1]"),
    ("times", "[1] -> [1] -> [1]"),
    ("prodz", "[[1]] -> [1]"),
];

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("not a numeral: {0}")]
pub struct NotANumeral(pub Term);

/// `suc^n zero`, i.e. a list of `n` units.
pub fn encode_nat(n: usize) -> Term {
    (0..n).fold(Term::Nil, |acc, _| Term::cons(Term::Unit, acc))
}

pub fn decode_nat(v: &Term) -> Result<usize, NotANumeral> {
    match v.as_list_literal() {
        Some(items) if items.iter().all(|t| matches!(t, Term::Unit)) => Ok(items.len()),
        _ => Err(NotANumeral(v.clone())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedTerm {
    pub name: String,
    /// Closed: references to earlier definitions are substituted in.
    pub term: Term,
    pub declared_type: Type,
}

/// The parsed prelude.
pub fn prelude() -> SourceProgram {
    parse_program(PRELUDE_SRC).expect("bundled prelude parses")
}

/// The prelude definitions, each checked against its declared type.
pub fn library() -> Vec<NamedTerm> {
    prelude()
        .expanded_defs()
        .into_iter()
        .map(|(name, term)| {
            let (_, ty) = DECLARED
                .iter()
                .find(|(n, _)| *n == name)
                .unwrap_or_else(|| panic!("no declared type for prelude definition `{name}`"));
            let declared_type = parse_type(ty).expect("declared type parses");
            if let Err(e) = check(&TypingEnv::new(), &term, &declared_type) {
                panic!("prelude definition `{name}` does not have type {declared_type}: {e}");
            }
            NamedTerm { name, term, declared_type }
        })
        .collect()
}

/// Looks up a prelude definition by name.
pub fn lookup(name: &str) -> Option<Term> {
    library().into_iter().find(|d| d.name == name).map(|d| d.term)
}
