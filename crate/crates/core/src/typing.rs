//! Monomorphic type inference with first-order unification.
//!
//! Every occurrence of `nil`, `cons`, `lrec` and every unannotated binder gets
//! fresh metavariables. After solving, the types bound by `catch` and used by
//! `throw` must be fully solved and arrow-free, and the result type must be
//! fully solved. Unsolved metavariables elsewhere are unconstrained and are
//! instantiated to `1` in the produced [`Derivation`].

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Term, Type};

/// Typing contexts for term variables and continuation variables.
///
/// Continuation types are arrow-free; [`TypingEnv::with_cont`] enforces it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingEnv {
    gamma: BTreeMap<String, Type>,
    delta: BTreeMap<String, Type>,
}

impl TypingEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_var(mut self, name: impl Into<String>, ty: Type) -> Self {
        self.gamma.insert(name.into(), ty);
        self
    }

    pub fn with_cont(mut self, name: impl Into<String>, ty: Type) -> Result<Self, TypeError> {
        let name = name.into();
        if !ty.is_arrow_free() || ty.has_meta() {
            return Err(TypeError::new(TypeErrorKind::NonArrowFreeThrow(ty), Vec::new()));
        }
        self.delta.insert(name, ty);
        Ok(self)
    }

    pub fn gamma(&self) -> &BTreeMap<String, Type> {
        &self.gamma
    }

    pub fn delta(&self) -> &BTreeMap<String, Type> {
        &self.delta
    }
}

pub type AstPath = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnboundVar(String),
    UnboundContVar(String),
    Mismatch { expected: Type, found: Type },
    NonArrowFreeCatch(Type),
    NonArrowFreeThrow(Type),
    /// Locations whose type could not be determined.
    AmbiguousType(Vec<AstPath>),
    OccursCheck { meta: u32, ty: Type },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    /// Child-index path from the root to the offending node.
    pub path: AstPath,
}

impl TypeError {
    fn new(kind: TypeErrorKind, path: AstPath) -> Self {
        TypeError { kind, path }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TypeErrorKind::UnboundVar(x) => write!(f, "unbound variable `{x}`")?,
            TypeErrorKind::UnboundContVar(a) => write!(f, "unbound continuation variable `{a}`")?,
            TypeErrorKind::Mismatch { expected, found } => {
                write!(f, "type mismatch: expected `{expected}`, found `{found}`")?
            }
            TypeErrorKind::NonArrowFreeCatch(ty) => {
                write!(f, "NonArrowFreeCatch: catch at type `{ty}`, which is not arrow-free")?
            }
            TypeErrorKind::NonArrowFreeThrow(ty) => {
                write!(f, "NonArrowFreeThrow: throw at type `{ty}`, which is not arrow-free")?
            }
            TypeErrorKind::AmbiguousType(paths) => {
                write!(f, "ambiguous type; add annotations at {}", paths.iter().map(|p| fmt_path(p)).collect::<Vec<_>>().join(", "))?
            }
            TypeErrorKind::OccursCheck { meta, ty } => write!(f, "occurs check: ?{meta} occurs in `{ty}`")?,
        }
        write!(f, " (at {})", fmt_path(&self.path))
    }
}

pub fn fmt_path(path: &[usize]) -> String {
    let parts: Vec<String> = path.iter().map(|i| i.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// True iff no arrow occurs in `ty`.
pub fn is_arrow_free(ty: &Type) -> bool {
    ty.is_arrow_free()
}

/// A typing derivation mirroring the shape of the term: one node per AST
/// node, carrying the type assigned to that node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub ty: Type,
    pub children: Vec<Derivation>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum BinderKind {
    Catch,
    Throw,
}

struct Solver {
    bindings: Vec<Option<Type>>,
}

impl Solver {
    fn fresh(&mut self) -> Type {
        self.bindings.push(None);
        Type::Meta((self.bindings.len() - 1) as u32)
    }

    fn shallow(&self, ty: &Type) -> Type {
        let mut cur = ty.clone();
        while let Type::Meta(m) = cur {
            match &self.bindings[m as usize] {
                Some(t) => cur = t.clone(),
                None => break,
            }
        }
        cur
    }

    fn resolve(&self, ty: &Type) -> Type {
        match self.shallow(ty) {
            Type::List(t) => Type::list(self.resolve(&t)),
            Type::Arrow(a, b) => Type::arrow(self.resolve(&a), self.resolve(&b)),
            t => t,
        }
    }

    fn occurs(&self, m: u32, ty: &Type) -> bool {
        match self.shallow(ty) {
            Type::Meta(n) => n == m,
            Type::Unit => false,
            Type::List(t) => self.occurs(m, &t),
            Type::Arrow(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
        }
    }

    /// Unifies; on failure reports the fully resolved outer types.
    fn unify(&mut self, expected: &Type, found: &Type) -> Result<(), TypeErrorKind> {
        self.unify_inner(expected, found).map_err(|e| match e {
            TypeErrorKind::Mismatch { .. } => TypeErrorKind::Mismatch {
                expected: self.resolve(expected),
                found: self.resolve(found),
            },
            other => other,
        })
    }

    fn unify_inner(&mut self, a: &Type, b: &Type) -> Result<(), TypeErrorKind> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Type::Meta(m), Type::Meta(n)) if m == n => Ok(()),
            (Type::Meta(m), t) | (t, Type::Meta(m)) => {
                if self.occurs(*m, t) {
                    return Err(TypeErrorKind::OccursCheck { meta: *m, ty: self.resolve(t) });
                }
                self.bindings[*m as usize] = Some(t.clone());
                Ok(())
            }
            (Type::Unit, Type::Unit) => Ok(()),
            (Type::List(x), Type::List(y)) => self.unify_inner(x, y),
            (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => {
                self.unify_inner(a1, a2)?;
                self.unify_inner(b1, b2)
            }
            _ => Err(TypeErrorKind::Mismatch { expected: a.clone(), found: b.clone() }),
        }
    }
}

struct Inference {
    solver: Solver,
    gamma: Vec<(String, Type)>,
    delta: Vec<(String, Type)>,
    binders: Vec<(BinderKind, AstPath, Type)>,
    /// Continuation variables left free in the term, when allowed.
    open_conts: Option<Vec<(String, Type)>>,
    path: AstPath,
}

impl Inference {
    fn new(env: &TypingEnv, open_conts: bool) -> Self {
        Inference {
            solver: Solver { bindings: Vec::new() },
            gamma: env.gamma.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            delta: env.delta.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            binders: Vec::new(),
            open_conts: open_conts.then(Vec::new),
            path: Vec::new(),
        }
    }

    fn err(&self, kind: TypeErrorKind) -> TypeError {
        TypeError::new(kind, self.path.clone())
    }

    fn unify(&mut self, expected: &Type, found: &Type) -> Result<(), TypeError> {
        self.solver.unify(expected, found).map_err(|k| self.err(k))
    }

    fn child(&mut self, i: usize, t: &Term) -> Result<Derivation, TypeError> {
        self.path.push(i);
        let d = self.walk(t);
        self.path.pop();
        d
    }

    fn lookup_cont(&mut self, a: &str) -> Result<Type, TypeError> {
        if let Some((_, ty)) = self.delta.iter().rev().find(|(n, _)| n == a) {
            return Ok(ty.clone());
        }
        if self.open_conts.is_some() {
            let ty = self.solver.fresh();
            self.open_conts.as_mut().unwrap().push((a.to_string(), ty.clone()));
            // bound at the outermost scope, so later occurrences share it
            self.delta.insert(0, (a.to_string(), ty.clone()));
            return Ok(ty);
        }
        Err(self.err(TypeErrorKind::UnboundContVar(a.to_string())))
    }

    fn walk(&mut self, t: &Term) -> Result<Derivation, TypeError> {
        let leaf = |ty| Ok(Derivation { ty, children: Vec::new() });
        match t {
            Term::Var(x) => match self.gamma.iter().rev().find(|(n, _)| n == x) {
                Some((_, ty)) => leaf(ty.clone()),
                None => Err(self.err(TypeErrorKind::UnboundVar(x.clone()))),
            },
            Term::Unit => leaf(Type::Unit),
            Term::Nil => leaf(Type::list(self.solver.fresh())),
            Term::Cons => {
                let s = self.solver.fresh();
                leaf(Type::arrows([s.clone(), Type::list(s.clone())], Type::list(s)))
            }
            Term::Lrec => {
                let (r, s) = (self.solver.fresh(), self.solver.fresh());
                leaf(lrec_type(r, s))
            }
            Term::Lam(x, ann, b) => {
                let dom = ann.clone().unwrap_or_else(|| self.solver.fresh());
                self.gamma.push((x.clone(), dom.clone()));
                let body = self.child(0, b);
                self.gamma.pop();
                let body = body?;
                Ok(Derivation { ty: Type::arrow(dom, body.ty.clone()), children: vec![body] })
            }
            Term::App(f, a) => {
                let fd = self.child(0, f)?;
                let ad = self.child(1, a)?;
                let res = self.solver.fresh();
                self.unify(&Type::arrow(ad.ty.clone(), res.clone()), &fd.ty)?;
                Ok(Derivation { ty: res, children: vec![fd, ad] })
            }
            Term::Catch(a, b) => {
                let psi = self.solver.fresh();
                self.binders.push((BinderKind::Catch, self.path.clone(), psi.clone()));
                self.delta.push((a.clone(), psi.clone()));
                let body = self.child(0, b);
                self.delta.pop();
                let body = body?;
                self.unify(&psi, &body.ty)?;
                Ok(Derivation { ty: psi, children: vec![body] })
            }
            Term::Throw(a, p) => {
                let psi = self.lookup_cont(a)?;
                self.binders.push((BinderKind::Throw, self.path.clone(), psi.clone()));
                let pd = self.child(0, p)?;
                self.unify(&psi, &pd.ty)?;
                Ok(Derivation { ty: self.solver.fresh(), children: vec![pd] })
            }
        }
    }

    fn finish(mut self, root: Derivation, expected: Option<&Type>, mode: Mode) -> Result<Solved, TypeError> {
        if let Some(ty) = expected {
            self.solver.unify(ty, &root.ty).map_err(|k| TypeError::new(k, Vec::new()))?;
        }
        for kind in [BinderKind::Catch, BinderKind::Throw] {
            for (k, path, ty) in &self.binders {
                let ty = self.solver.resolve(ty);
                if *k == kind && !ty.is_arrow_free() {
                    let err = match kind {
                        BinderKind::Catch => TypeErrorKind::NonArrowFreeCatch(ty),
                        BinderKind::Throw => TypeErrorKind::NonArrowFreeThrow(ty),
                    };
                    return Err(TypeError::new(err, path.clone()));
                }
            }
        }
        let mut ambiguous: Vec<AstPath> = self
            .binders
            .iter()
            .filter(|(_, _, ty)| self.solver.resolve(ty).has_meta())
            .map(|(_, p, _)| p.clone())
            .collect();
        if self.solver.resolve(&root.ty).has_meta() {
            ambiguous.insert(0, Vec::new());
        }
        if !ambiguous.is_empty() && mode == Mode::Principal {
            ambiguous.dedup();
            let first = ambiguous[0].clone();
            return Err(TypeError::new(TypeErrorKind::AmbiguousType(ambiguous), first));
        }
        let derivation = self.ground(&root);
        let open_conts = self
            .open_conts
            .take()
            .unwrap_or_default()
            .into_iter()
            .map(|(a, ty)| (a, default_metas(&self.solver.resolve(&ty))))
            .collect();
        Ok(Solved { derivation, open_conts })
    }

    fn ground(&self, d: &Derivation) -> Derivation {
        Derivation {
            ty: default_metas(&self.solver.resolve(&d.ty)),
            children: d.children.iter().map(|c| self.ground(c)).collect(),
        }
    }
}

struct Solved {
    derivation: Derivation,
    open_conts: Vec<(String, Type)>,
}

fn default_metas(ty: &Type) -> Type {
    match ty {
        Type::Meta(_) => Type::Unit,
        Type::Unit => Type::Unit,
        Type::List(t) => Type::list(default_metas(t)),
        Type::Arrow(a, b) => Type::arrow(default_metas(a), default_metas(b)),
    }
}

/// `r -> (s -> [s] -> r -> r) -> [s] -> r`
pub fn lrec_type(r: Type, s: Type) -> Type {
    let step = Type::arrows([s.clone(), Type::list(s.clone()), r.clone()], r.clone());
    Type::arrows([r.clone(), step, Type::list(s)], r)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Unsolved metavariables are an error.
    Principal,
    /// Unsolved metavariables are instantiated to `1`.
    Instance,
}

fn run(env: &TypingEnv, t: &Term, expected: Option<&Type>, open: bool) -> Result<Solved, TypeError> {
    run_mode(env, t, expected, open, Mode::Principal)
}

fn run_mode(env: &TypingEnv, t: &Term, expected: Option<&Type>, open: bool, mode: Mode) -> Result<Solved, TypeError> {
    let mut inf = Inference::new(env, open);
    let root = inf.walk(t)?;
    inf.finish(root, expected, mode)
}

/// Infers the unique type of `t` under `env`.
pub fn infer(env: &TypingEnv, t: &Term) -> Result<Type, TypeError> {
    run(env, t, None, false).map(|s| s.derivation.ty)
}

/// Checks `t` against `ty`.
pub fn check(env: &TypingEnv, t: &Term, ty: &Type) -> Result<(), TypeError> {
    run(env, t, Some(ty), false).map(|_| ())
}

/// Like [`infer`]/[`check`], returning the full ground derivation.
pub fn infer_derivation(env: &TypingEnv, t: &Term, expected: Option<&Type>) -> Result<Derivation, TypeError> {
    run(env, t, expected, false).map(|s| s.derivation)
}

/// Some derivation of `t` (at `expected`, if given), with every type left
/// open by the constraints instantiated to `1`. Succeeds exactly when `t` is
/// typable at all, whereas [`infer`] also demands that the type of every
/// binder and of the whole term be determined.
pub fn derive(env: &TypingEnv, t: &Term, expected: Option<&Type>) -> Result<Derivation, TypeError> {
    run_mode(env, t, expected, false, Mode::Instance).map(|s| s.derivation)
}

/// [`derive`] with free continuation variables allowed, as in
/// [`infer_with_open_conts`].
pub fn derive_with_open_conts(env: &TypingEnv, t: &Term) -> Result<(Derivation, Vec<(String, Type)>), TypeError> {
    run_mode(env, t, None, true, Mode::Instance).map(|s| (s.derivation, s.open_conts))
}

/// Infers a type for `t` where free continuation variables are allowed; each
/// gets an inferred arrow-free type, returned alongside the result type.
pub fn infer_with_open_conts(env: &TypingEnv, t: &Term) -> Result<(Type, Vec<(String, Type)>), TypeError> {
    run(env, t, None, true).map(|s| (s.derivation.ty, s.open_conts))
}

/// Validates a derivation rule by rule, with every type known. Independent of
/// the inference engine.
pub fn replay(env: &TypingEnv, t: &Term, d: &Derivation) -> Result<(), String> {
    let mut gamma: Vec<(String, Type)> = env.gamma.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut delta: Vec<(String, Type)> = env.delta.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    replay_node(&mut gamma, &mut delta, t, d)
}

fn replay_node(
    gamma: &mut Vec<(String, Type)>,
    delta: &mut Vec<(String, Type)>,
    t: &Term,
    d: &Derivation,
) -> Result<(), String> {
    if d.ty.has_meta() {
        return Err(format!("derivation for `{t}` contains a metavariable"));
    }
    if d.children.len() != t.children().len() {
        return Err(format!("derivation shape does not match `{t}`"));
    }
    let bad = |rule: &str| Err(format!("rule {rule} does not derive `{t}` : `{}`", d.ty));
    match t {
        Term::Var(x) => match gamma.iter().rev().find(|(n, _)| n == x) {
            Some((_, ty)) if *ty == d.ty => Ok(()),
            _ => bad("var"),
        },
        Term::Unit => if d.ty == Type::Unit { Ok(()) } else { bad("unit") },
        Term::Nil => if matches!(d.ty, Type::List(_)) { Ok(()) } else { bad("nil") },
        Term::Cons => match &d.ty {
            Type::Arrow(s, rest) if **rest == Type::arrow(Type::list((**s).clone()), Type::list((**s).clone())) => Ok(()),
            _ => bad("cons"),
        },
        Term::Lrec => match &d.ty {
            Type::Arrow(r, rest) => match &**rest {
                Type::Arrow(_, rest2) => match &**rest2 {
                    Type::Arrow(l, _) => match &**l {
                        Type::List(s) if d.ty == lrec_type((**r).clone(), (**s).clone()) => Ok(()),
                        _ => bad("lrec"),
                    },
                    _ => bad("lrec"),
                },
                _ => bad("lrec"),
            },
            _ => bad("lrec"),
        },
        Term::Lam(x, ann, b) => {
            let Type::Arrow(dom, cod) = &d.ty else { return bad("abs") };
            if ann.as_ref().is_some_and(|a| a != &**dom) || d.children[0].ty != **cod {
                return bad("abs");
            }
            gamma.push((x.clone(), (**dom).clone()));
            let r = replay_node(gamma, delta, b, &d.children[0]);
            gamma.pop();
            r
        }
        Term::App(f, a) => {
            if d.children[0].ty != Type::arrow(d.children[1].ty.clone(), d.ty.clone()) {
                return bad("app");
            }
            replay_node(gamma, delta, f, &d.children[0])?;
            replay_node(gamma, delta, a, &d.children[1])
        }
        Term::Catch(a, b) => {
            if !d.ty.is_arrow_free() || d.children[0].ty != d.ty {
                return bad("catch");
            }
            delta.push((a.clone(), d.ty.clone()));
            let r = replay_node(gamma, delta, b, &d.children[0]);
            delta.pop();
            r
        }
        Term::Throw(a, p) => match delta.iter().rev().find(|(n, _)| n == a) {
            Some((_, psi)) if *psi == d.children[0].ty => replay_node(gamma, delta, p, &d.children[0]),
            _ => bad("throw"),
        },
    }
}
