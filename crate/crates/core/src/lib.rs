//! A call-by-value lambda calculus with `catch`/`throw` control operators,
//! lists with a primitive recursor, and a unit type.
//!
//! The crate provides the syntax and a concrete grammar, monomorphic type
//! inference, the reduction relation with a call-by-value evaluator, parallel
//! reduction and complete developments, a prelude of derived programs, and
//! randomized checkers for the metatheory (subject reduction, progress,
//! confluence, strong normalization).

pub mod confluence;
pub mod metatheory;
pub mod reduction;
pub mod stdlib;
pub mod surface;
pub mod syntax;
pub mod typing;

pub use reduction::{evaluate, step_cbv, Outcome, OutcomeKind, ReductionEvent, RuleTag};
pub use surface::{parse_program, parse_term, print, ParseError, SourceProgram};
pub use syntax::{alpha_eq, Term, Type};
pub use typing::{check, infer, TypeError, TypingEnv};
