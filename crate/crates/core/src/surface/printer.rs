use std::fmt::{self, Write};

use crate::syntax::{Term, Type};

/// Printing options. With `sugar` on, numerals `suc^n zero` print as `#n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PrintOptions {
    pub sugar: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    /// Binder forms allowed unparenthesized.
    Top,
    /// Function position of an application.
    Fun,
    /// Argument position.
    Arg,
}

/// Renders `t` in concrete syntax without numeral sugar.
pub fn print(t: &Term) -> String {
    print_with(t, PrintOptions::default())
}

pub fn print_with(t: &Term, opts: PrintOptions) -> String {
    let mut out = String::new();
    write_term(&mut out, t, Prec::Top, opts).expect("writing to a String cannot fail");
    out
}

pub fn print_type(ty: &Type) -> String {
    let mut out = String::new();
    write_type(&mut out, ty, false).expect("writing to a String cannot fail");
    out
}

fn numeral_value(items: &[&Term]) -> Option<usize> {
    items.iter().all(|t| matches!(t, Term::Unit)).then_some(items.len())
}

fn write_term(out: &mut impl Write, t: &Term, prec: Prec, opts: PrintOptions) -> fmt::Result {
    if let Some(items) = t.as_list_literal() {
        if opts.sugar {
            if let Some(n) = numeral_value(&items) {
                return write!(out, "#{n}");
            }
        }
        if items.is_empty() {
            return out.write_str("[]");
        }
        out.write_char('[')?;
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                out.write_str(", ")?;
            }
            write_term(out, item, Prec::Top, opts)?;
        }
        return out.write_char(']');
    }
    match t {
        Term::Var(x) => out.write_str(x),
        Term::Unit => out.write_str("()"),
        Term::Nil => out.write_str("[]"),
        Term::Cons => out.write_str("cons"),
        Term::Lrec => out.write_str("lrec"),
        Term::App(f, a) => {
            let parens = prec == Prec::Arg;
            if parens {
                out.write_char('(')?;
            }
            write_term(out, f, Prec::Fun, opts)?;
            out.write_char(' ')?;
            write_term(out, a, Prec::Arg, opts)?;
            if parens {
                out.write_char(')')?;
            }
            Ok(())
        }
        Term::Lam(..) | Term::Catch(..) | Term::Throw(..) => {
            let parens = prec != Prec::Top;
            if parens {
                out.write_char('(')?;
            }
            match t {
                Term::Lam(x, None, b) => {
                    write!(out, "\\{x}. ")?;
                    write_term(out, b, Prec::Top, opts)?;
                }
                Term::Lam(x, Some(ty), b) => {
                    write!(out, "\\{x}:")?;
                    write_type(out, ty, false)?;
                    out.write_str(". ")?;
                    write_term(out, b, Prec::Top, opts)?;
                }
                Term::Catch(a, b) => {
                    write!(out, "catch {a}. ")?;
                    write_term(out, b, Prec::Top, opts)?;
                }
                Term::Throw(a, p) => {
                    write!(out, "throw {a} ")?;
                    write_term(out, p, Prec::Top, opts)?;
                }
                _ => unreachable!(),
            }
            if parens {
                out.write_char(')')?;
            }
            Ok(())
        }
    }
}

fn write_type(out: &mut impl Write, ty: &Type, left_of_arrow: bool) -> fmt::Result {
    match ty {
        Type::Unit => out.write_char('1'),
        Type::Meta(n) => write!(out, "?{n}"),
        Type::List(t) => {
            out.write_char('[')?;
            write_type(out, t, false)?;
            out.write_char(']')
        }
        Type::Arrow(a, b) => {
            if left_of_arrow {
                out.write_char('(')?;
            }
            write_type(out, a, true)?;
            out.write_str(" -> ")?;
            write_type(out, b, false)?;
            if left_of_arrow {
                out.write_char(')')?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sugar = f.alternate();
        write_term(f, self, Prec::Top, PrintOptions { sugar })
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_type(f, self, false)
    }
}
