//! Abstract syntax: types, terms, binding and capture-avoiding substitution.

use std::collections::BTreeSet;

/// Types of the calculus. `Meta` only appears while inference is running.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Unit,
    List(Box<Type>),
    Arrow(Box<Type>, Box<Type>),
    Meta(u32),
}

impl Type {
    pub fn list(elem: Type) -> Type {
        Type::List(Box::new(elem))
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Box::new(dom), Box::new(cod))
    }

    /// Right-nested arrow `a1 -> a2 -> ... -> result`.
    pub fn arrows<I: IntoIterator<Item = Type>>(args: I, result: Type) -> Type
    where
        I::IntoIter: DoubleEndedIterator,
    {
        args.into_iter().rev().fold(result, |acc, a| Type::arrow(a, acc))
    }

    /// The natural numbers, encoded as lists of units.
    pub fn nat() -> Type {
        Type::list(Type::Unit)
    }

    pub fn is_arrow_free(&self) -> bool {
        match self {
            Type::Unit | Type::Meta(_) => true,
            Type::List(t) => t.is_arrow_free(),
            Type::Arrow(..) => false,
        }
    }

    pub fn has_meta(&self) -> bool {
        match self {
            Type::Unit => false,
            Type::Meta(_) => true,
            Type::List(t) => t.has_meta(),
            Type::Arrow(a, b) => a.has_meta() || b.has_meta(),
        }
    }
}

/// Terms. `cons` and `lrec` are nullary constants; their saturated forms are
/// spines of applications.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Unit,
    Nil,
    Cons,
    Lrec,
    Lam(String, Option<Type>, Box<Term>),
    App(Box<Term>, Box<Term>),
    Catch(String, Box<Term>),
    Throw(String, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn lam(binder: impl Into<String>, body: Term) -> Term {
        Term::Lam(binder.into(), None, Box::new(body))
    }

    pub fn lam_ann(binder: impl Into<String>, ty: Type, body: Term) -> Term {
        Term::Lam(binder.into(), Some(ty), Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// Left-nested application of `head` to `args`.
    pub fn apps<I: IntoIterator<Item = Term>>(head: Term, args: I) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn catch(cont: impl Into<String>, body: Term) -> Term {
        Term::Catch(cont.into(), Box::new(body))
    }

    pub fn throw(cont: impl Into<String>, payload: Term) -> Term {
        Term::Throw(cont.into(), Box::new(payload))
    }

    /// `cons head tail`
    pub fn cons(head: Term, tail: Term) -> Term {
        Term::apps(Term::Cons, [head, tail])
    }

    /// `lrec r s l`
    pub fn lrec(base: Term, step: Term, list: Term) -> Term {
        Term::apps(Term::Lrec, [base, step, list])
    }

    /// The literal list `[t1, ..., tn]`.
    pub fn list<I>(items: I) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        items.into_iter().rev().fold(Term::Nil, |tail, h| Term::cons(h, tail))
    }

    /// Splits an application spine into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Term::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// Matches `cons h t`.
    pub fn as_cons(&self) -> Option<(&Term, &Term)> {
        match self.spine() {
            (Term::Cons, args) if args.len() == 2 => Some((args[0], args[1])),
            _ => None,
        }
    }

    /// Matches `lrec r s l`.
    pub fn as_lrec(&self) -> Option<(&Term, &Term, &Term)> {
        match self.spine() {
            (Term::Lrec, args) if args.len() == 3 => Some((args[0], args[1], args[2])),
            _ => None,
        }
    }

    /// Elements of a `cons` chain terminated by `nil`.
    pub fn as_list_literal(&self) -> Option<Vec<&Term>> {
        let mut items = Vec::new();
        let mut cur = self;
        loop {
            if let Term::Nil = cur {
                return Some(items);
            }
            let (h, t) = cur.as_cons()?;
            items.push(h);
            cur = t;
        }
    }

    pub fn is_value(&self) -> bool {
        is_value(self)
    }

    pub fn is_throw(&self) -> bool {
        matches!(self, Term::Throw(..))
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::App(f, a) => vec![f, a],
            Term::Lam(_, _, b) | Term::Catch(_, b) | Term::Throw(_, b) => vec![b],
            _ => Vec::new(),
        }
    }

    /// The subterm reached by following child indices from the root.
    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Rebuilds the term with the subterm at `path` replaced.
    ///
    /// Panics if the path does not address a subterm.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Term {
        let Some((&i, rest)) = path.split_first() else {
            return new;
        };
        match (self, i) {
            (Term::App(f, a), 0) => Term::App(Box::new(f.replace_at(rest, new)), a.clone()),
            (Term::App(f, a), 1) => Term::App(f.clone(), Box::new(a.replace_at(rest, new))),
            (Term::Lam(x, ann, b), 0) => Term::Lam(x.clone(), ann.clone(), Box::new(b.replace_at(rest, new))),
            (Term::Catch(a, b), 0) => Term::Catch(a.clone(), Box::new(b.replace_at(rest, new))),
            (Term::Throw(a, b), 0) => Term::Throw(a.clone(), Box::new(b.replace_at(rest, new))),
            _ => panic!("invalid path component {i} for {self:?}"),
        }
    }
}

/// Membership in the value grammar.
pub fn is_value(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Unit | Term::Nil | Term::Cons | Term::Lrec | Term::Lam(..) => true,
        Term::Catch(..) | Term::Throw(..) => false,
        Term::App(..) => {
            let (head, args) = t.spine();
            let limit = match head {
                Term::Cons => 2,
                Term::Lrec => 2,
                _ => return false,
            };
            args.len() <= limit && args.iter().all(|a| is_value(a))
        }
    }
}

/// Free term variables and free continuation variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarSets {
    pub term_vars: BTreeSet<String>,
    pub cont_vars: BTreeSet<String>,
}

pub fn free_vars(t: &Term) -> VarSets {
    fn go(t: &Term, bound: &mut Vec<String>, cbound: &mut Vec<String>, out: &mut VarSets) {
        match t {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.term_vars.insert(x.clone());
                }
            }
            Term::Unit | Term::Nil | Term::Cons | Term::Lrec => {}
            Term::Lam(x, _, b) => {
                bound.push(x.clone());
                go(b, bound, cbound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                go(f, bound, cbound, out);
                go(a, bound, cbound, out);
            }
            Term::Catch(a, b) => {
                cbound.push(a.clone());
                go(b, bound, cbound, out);
                cbound.pop();
            }
            Term::Throw(a, p) => {
                if !cbound.contains(a) {
                    out.cont_vars.insert(a.clone());
                }
                go(p, bound, cbound, out);
            }
        }
    }
    let mut out = VarSets::default();
    go(t, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// Whether continuation variable `a` occurs free in `t`.
pub fn cont_free_in(a: &str, t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Unit | Term::Nil | Term::Cons | Term::Lrec => false,
        Term::Lam(_, _, b) => cont_free_in(a, b),
        Term::App(f, x) => cont_free_in(a, f) || cont_free_in(a, x),
        Term::Catch(c, b) => c != a && cont_free_in(a, b),
        Term::Throw(c, p) => c == a || cont_free_in(a, p),
    }
}

/// Whether term variable `x` occurs free in `t`.
pub fn var_free_in(x: &str, t: &Term) -> bool {
    match t {
        Term::Var(y) => x == y,
        Term::Unit | Term::Nil | Term::Cons | Term::Lrec => false,
        Term::Lam(y, _, b) => y != x && var_free_in(x, b),
        Term::App(f, a) => var_free_in(x, f) || var_free_in(x, a),
        Term::Catch(_, b) | Term::Throw(_, b) => var_free_in(x, b),
    }
}

fn term_names(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::Lam(x, _, b) => {
            out.insert(x.clone());
            term_names(b, out);
        }
        _ => t.children().into_iter().for_each(|c| term_names(c, out)),
    }
}

fn cont_names(t: &Term, out: &mut BTreeSet<String>) {
    if let Term::Catch(a, _) | Term::Throw(a, _) = t {
        out.insert(a.clone());
    }
    t.children().into_iter().for_each(|c| cont_names(c, out));
}

/// Deterministic fresh name: `base` followed by as many primes as needed.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding substitution `t[x := r]`.
///
/// Binders of `t` that would capture a free term or continuation variable of
/// `r` are renamed with [`fresh_name`].
pub fn subst(t: &Term, x: &str, r: &Term) -> Term {
    let fv = free_vars(r);
    subst_with(t, x, r, &fv)
}

fn subst_with(t: &Term, x: &str, r: &Term, fv: &VarSets) -> Term {
    match t {
        Term::Var(y) if y == x => r.clone(),
        Term::Var(_) | Term::Unit | Term::Nil | Term::Cons | Term::Lrec => t.clone(),
        Term::App(f, a) => Term::app(subst_with(f, x, r, fv), subst_with(a, x, r, fv)),
        Term::Throw(a, p) => Term::throw(a.clone(), subst_with(p, x, r, fv)),
        Term::Lam(y, ann, b) => {
            if y == x || !var_free_in(x, b) {
                return t.clone();
            }
            if fv.term_vars.contains(y) {
                let mut avoid = fv.term_vars.clone();
                term_names(b, &mut avoid);
                avoid.insert(x.to_string());
                let y2 = fresh_name(y, &avoid);
                let renamed = subst(b, y, &Term::Var(y2.clone()));
                Term::Lam(y2, ann.clone(), Box::new(subst_with(&renamed, x, r, fv)))
            } else {
                Term::Lam(y.clone(), ann.clone(), Box::new(subst_with(b, x, r, fv)))
            }
        }
        Term::Catch(a, b) => {
            if !var_free_in(x, b) {
                return t.clone();
            }
            if fv.cont_vars.contains(a) {
                let mut avoid = fv.cont_vars.clone();
                cont_names(b, &mut avoid);
                let a2 = fresh_name(a, &avoid);
                let renamed = rename_cont(b, a, &a2);
                Term::catch(a2, subst_with(&renamed, x, r, fv))
            } else {
                Term::catch(a.clone(), subst_with(b, x, r, fv))
            }
        }
    }
}

/// Renames free occurrences of continuation `from` to `to`. `to` must not be
/// bound anywhere inside `t`.
fn rename_cont(t: &Term, from: &str, to: &str) -> Term {
    match t {
        Term::Throw(a, p) => {
            let a = if a == from { to.to_string() } else { a.clone() };
            Term::throw(a, rename_cont(p, from, to))
        }
        Term::Catch(a, _) if a == from => t.clone(),
        Term::Catch(a, b) => Term::catch(a.clone(), rename_cont(b, from, to)),
        Term::Lam(y, ann, b) => Term::Lam(y.clone(), ann.clone(), Box::new(rename_cont(b, from, to))),
        Term::App(f, a) => Term::app(rename_cont(f, from, to), rename_cont(a, from, to)),
        _ => t.clone(),
    }
}

/// Canonical representative of the alpha-equivalence class of `t`: binders are
/// renamed, in pre-order, to `%0`, `%1`, ... . These names cannot be written in
/// source, so they never collide with free names.
pub fn canonical(t: &Term) -> Term {
    struct Canon {
        vars: Vec<(String, String)>,
        conts: Vec<(String, String)>,
        next: usize,
    }
    fn lookup(env: &[(String, String)], name: &str) -> String {
        env.iter()
            .rev()
            .find(|(orig, _)| orig == name)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| name.to_string())
    }
    impl Canon {
        fn fresh(&mut self) -> String {
            let n = format!("%{}", self.next);
            self.next += 1;
            n
        }
        fn go(&mut self, t: &Term) -> Term {
            match t {
                Term::Var(x) => Term::Var(lookup(&self.vars, x)),
                Term::Unit | Term::Nil | Term::Cons | Term::Lrec => t.clone(),
                Term::App(f, a) => {
                    let f = self.go(f);
                    Term::app(f, self.go(a))
                }
                Term::Lam(x, ann, b) => {
                    let c = self.fresh();
                    self.vars.push((x.clone(), c.clone()));
                    let b = self.go(b);
                    self.vars.pop();
                    Term::Lam(c, ann.clone(), Box::new(b))
                }
                Term::Catch(a, b) => {
                    let c = self.fresh();
                    self.conts.push((a.clone(), c.clone()));
                    let b = self.go(b);
                    self.conts.pop();
                    Term::catch(c, b)
                }
                Term::Throw(a, p) => Term::throw(lookup(&self.conts, a), self.go(p)),
            }
        }
    }
    Canon { vars: Vec::new(), conts: Vec::new(), next: 0 }.go(t)
}

/// Equality up to renaming of bound term and continuation variables.
/// Binder annotations must agree exactly.
pub fn alpha_eq(t1: &Term, t2: &Term) -> bool {
    t1 == t2 || canonical(t1) == canonical(t2)
}

/// Number of AST nodes. Annotations are not counted.
pub fn size(t: &Term) -> usize {
    1 + t.children().into_iter().map(size).sum::<usize>()
}
