use super::lexer::{tokenize, Spanned, Tok};
use super::{ParseError, SourceProgram};
use crate::stdlib::encode_nat;
use crate::syntax::{Term, Type};

/// Binder introduced when desugaring an ascription `(t : ty)` to `(\x:ty. x) t`.
const ASCRIPTION_BINDER: &str = "x";

/// Numerals expand to unary lists, so their magnitude is bounded.
pub const MAX_NUMERAL: u64 = 1 << 20;

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: tokenize(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError::new(s.line, s.column, message, expected.iter().map(|e| e.to_string()).collect())
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let found = self.peek().describe();
        self.error(format!("unexpected {found}, expected {}", expected.join(" or ")), expected)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[&tok.describe()]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn program(&mut self) -> Result<SourceProgram, ParseError> {
        let mut prog = SourceProgram::default();
        while *self.peek() == Tok::Def {
            self.bump();
            let at = self.pos;
            let name = self.ident()?;
            if prog.defs.iter().any(|(n, _)| *n == name) {
                let s = &self.toks[at];
                return Err(ParseError::new(s.line, s.column, format!("duplicate definition of `{name}`"), vec![]));
            }
            self.expect(Tok::Equals)?;
            let body = self.term()?;
            self.expect(Tok::Semi)?;
            prog.defs.push((name, body));
        }
        if *self.peek() == Tok::Main {
            self.bump();
            self.expect(Tok::Equals)?;
            prog.main = Some(self.term()?);
            self.expect(Tok::Semi)?;
        }
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected(&["`def`", "`main`", "end of input"]));
        }
        Ok(prog)
    }

    fn starts_atom(tok: &Tok) -> bool {
        matches!(
            tok,
            Tok::LParen | Tok::LBracket | Tok::Cons | Tok::Lrec | Tok::Ident(_) | Tok::Numeral(_)
        )
    }

    fn starts_prefix(tok: &Tok) -> bool {
        matches!(tok, Tok::Backslash | Tok::Catch | Tok::Throw)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Backslash => {
                self.bump();
                let x = self.ident()?;
                let ann = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.ty()?)
                } else {
                    None
                };
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                Ok(Term::Lam(x, ann, Box::new(body)))
            }
            Tok::Catch => {
                self.bump();
                let a = self.ident()?;
                self.expect(Tok::Dot)?;
                Ok(Term::catch(a, self.term()?))
            }
            Tok::Throw => {
                self.bump();
                let a = self.ident()?;
                Ok(Term::throw(a, self.term()?))
            }
            _ => self.application(),
        }
    }

    fn application(&mut self) -> Result<Term, ParseError> {
        if !Self::starts_atom(self.peek()) {
            return Err(self.unexpected(&["term"]));
        }
        let mut t = self.atom()?;
        loop {
            if Self::starts_atom(self.peek()) {
                let a = self.atom()?;
                t = Term::app(t, a);
            } else if Self::starts_prefix(self.peek()) {
                // a trailing binder form is the last argument and extends maximally
                let a = self.term()?;
                return Ok(Term::app(t, a));
            } else {
                return Ok(t);
            }
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        if !Self::starts_atom(self.peek()) {
            return Err(self.unexpected(&["term"]));
        }
        match self.bump() {
            Tok::Cons => Ok(Term::Cons),
            Tok::Lrec => Ok(Term::Lrec),
            Tok::Ident(x) => Ok(Term::Var(x)),
            Tok::Numeral(n) if n > MAX_NUMERAL => {
                self.pos -= 1;
                Err(self.error(format!("numeral `#{n}` exceeds the maximum #{MAX_NUMERAL}"), &[]))
            }
            Tok::Numeral(n) => Ok(encode_nat(n as usize)),
            Tok::LParen => {
                if *self.peek() == Tok::RParen {
                    self.bump();
                    return Ok(Term::Unit);
                }
                let t = self.term()?;
                if *self.peek() == Tok::Colon {
                    self.bump();
                    let ty = self.ty()?;
                    self.expect(Tok::RParen)?;
                    let id = Term::lam_ann(ASCRIPTION_BINDER, ty, Term::var(ASCRIPTION_BINDER));
                    return Ok(Term::app(id, t));
                }
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::LBracket => {
                if *self.peek() == Tok::RBracket {
                    self.bump();
                    return Ok(Term::Nil);
                }
                let mut items = vec![self.term()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    items.push(self.term()?);
                }
                self.expect(Tok::RBracket)?;
                Ok(Term::list(items))
            }
            _ => unreachable!("checked by starts_atom"),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let dom = self.ty_atom()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            Ok(Type::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn ty_atom(&mut self) -> Result<Type, ParseError> {
        match self.peek() {
            Tok::Number(1) => {
                self.bump();
                Ok(Type::Unit)
            }
            Tok::LBracket => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RBracket)?;
                Ok(Type::list(t))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => Err(self.unexpected(&["`1`", "`[`", "`(`"])),
        }
    }
}

/// Parses a whole `.lc` source file.
pub fn parse_program(src: &str) -> Result<SourceProgram, ParseError> {
    Parser::new(src)?.program()
}

/// Parses a single term; the whole input must be consumed.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["end of input"]));
    }
    Ok(t)
}

/// Parses a type.
pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["end of input"]));
    }
    Ok(t)
}
