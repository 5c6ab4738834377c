//! Parallel reduction, complete developments and joinability.
//!
//! A throw may jump over a *compound context*, a stack of the frames `[] t`,
//! `v []` and `throw a []`. Because the left operand of an application is
//! entered only while it is not a value, a term has at most one descent
//! through such frames, and every throw met along it gives one decomposition.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::syntax::{canonical, cont_free_in, is_value, size, subst, Term};

/// Default bound on the size of terms whose parallel reducts are enumerated.
pub const DEFAULT_NODE_BUDGET: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfluenceError {
    #[error("term of size {size} exceeds the node budget {budget}")]
    BudgetExceeded { size: usize, budget: usize },
    #[error("not a parallel reduction step")]
    NotAParallelStep,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Frame {
    /// `[] arg`
    AppFun(Term),
    /// `fun []`, with `fun` a value
    AppArg(Term),
    /// `throw a []`
    ThrowFrame(String),
}

/// A term split as `frames[hole_subject]`, outermost frame first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompoundContextView {
    pub frames: Vec<Frame>,
    pub hole_subject: Term,
}

impl CompoundContextView {
    pub fn plug(&self, subject: Term) -> Term {
        self.frames.iter().rev().fold(subject, |acc, f| match f {
            Frame::AppFun(arg) => Term::app(acc, arg.clone()),
            Frame::AppArg(fun) => Term::app(fun.clone(), acc),
            Frame::ThrowFrame(a) => Term::throw(a.clone(), acc),
        })
    }

    pub fn reassemble(&self) -> Term {
        self.plug(self.hole_subject.clone())
    }
}

/// Every way of writing `t` as `E[throw a s]` for a compound context `E`
/// (including the empty one), outermost first.
pub fn throw_decompositions(t: &Term) -> Vec<CompoundContextView> {
    let mut out = Vec::new();
    let mut frames = Vec::new();
    let mut cur = t;
    loop {
        if cur.is_throw() {
            out.push(CompoundContextView { frames: frames.clone(), hole_subject: cur.clone() });
        }
        match cur {
            Term::App(f, a) if !is_value(f) => {
                frames.push(Frame::AppFun((**a).clone()));
                cur = f;
            }
            Term::App(f, a) => {
                frames.push(Frame::AppArg((**f).clone()));
                cur = a;
            }
            Term::Throw(b, p) => {
                frames.push(Frame::ThrowFrame(b.clone()));
                cur = p;
            }
            _ => return out,
        }
    }
}

/// The innermost throw reachable through compound-context frames; the same
/// walk as [`throw_decompositions`] without building the views.
fn deepest_context_throw(t: &Term) -> Option<&Term> {
    let mut found = None;
    let mut cur = t;
    loop {
        if cur.is_throw() {
            found = Some(cur);
        }
        cur = match cur {
            Term::App(f, _) if !is_value(f) => f,
            Term::App(_, a) => a,
            Term::Throw(_, p) => p,
            _ => return found,
        };
    }
}

/// The complete development: contracts every redex of `t` at once.
///
/// A throw in compound-context position swallows the largest compound
/// context above it, so only the innermost such throw survives.
pub fn complete_development(t: &Term) -> Term {
    if let Term::App(f, v) = t {
        if let Term::Lam(x, _, body) = &**f {
            if is_value(v) {
                return subst(&complete_development(body), x, &complete_development(v));
            }
        }
    }
    if let Some(Term::Throw(a, p)) = deepest_context_throw(t) {
        return Term::throw(a.clone(), complete_development(p));
    }
    if let Term::Catch(a, b) = t {
        match &**b {
            Term::Throw(c, p) if c == a => return Term::catch(a.clone(), complete_development(p)),
            Term::Throw(c, v) if is_value(v) && !cont_free_in(a, v) => {
                return Term::throw(c.clone(), complete_development(v))
            }
            v if is_value(v) && !cont_free_in(a, v) => return complete_development(v),
            _ => {}
        }
    }
    if let Some((r, s, l)) = t.as_lrec() {
        if is_value(r) && is_value(s) {
            if let Term::Nil = l {
                return complete_development(r);
            }
            if let Some((h, tl)) = l.as_cons() {
                if is_value(h) && is_value(tl) {
                    let (r, s, h, tl) = (
                        complete_development(r),
                        complete_development(s),
                        complete_development(h),
                        complete_development(tl),
                    );
                    let rec = Term::lrec(r, s.clone(), tl.clone());
                    return Term::apps(s, [h, tl, rec]);
                }
            }
        }
    }
    match t {
        Term::Var(_) | Term::Unit | Term::Nil | Term::Cons | Term::Lrec => t.clone(),
        Term::Lam(x, ann, b) => Term::Lam(x.clone(), ann.clone(), Box::new(complete_development(b))),
        Term::App(f, a) => Term::app(complete_development(f), complete_development(a)),
        Term::Catch(a, b) => Term::catch(a.clone(), complete_development(b)),
        Term::Throw(a, p) => Term::throw(a.clone(), complete_development(p)),
    }
}

/// A set of terms modulo alpha-equivalence, in insertion order.
#[derive(Clone, Debug, Default)]
pub struct TermSet {
    keys: HashSet<Term>,
    items: Vec<Term>,
}

impl TermSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, t: Term) -> bool {
        if self.keys.insert(canonical(&t)) {
            self.items.push(t);
            true
        } else {
            false
        }
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.keys.contains(&canonical(t))
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Term> {
        self.items.iter()
    }

    pub fn into_vec(self) -> Vec<Term> {
        self.items
    }

    /// Whether the two sets share an element.
    pub fn intersects(&self, other: &TermSet) -> bool {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.keys.iter().any(|k| big.keys.contains(k))
    }
}

impl FromIterator<Term> for TermSet {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        let mut s = TermSet::new();
        for t in iter {
            s.insert(t);
        }
        s
    }
}

impl<'a> IntoIterator for &'a TermSet {
    type Item = &'a Term;
    type IntoIter = std::slice::Iter<'a, Term>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Enumerates parallel reducts, caching results per alpha-class.
#[derive(Default)]
pub struct ParallelReducer {
    cache: HashMap<Term, TermSet>,
}

impl ParallelReducer {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{t' | t => t'}` modulo alpha-equivalence.
    pub fn reducts(&mut self, t: &Term, node_budget: usize) -> Result<&TermSet, ConfluenceError> {
        let n = size(t);
        if n > node_budget {
            return Err(ConfluenceError::BudgetExceeded { size: n, budget: node_budget });
        }
        let key = canonical(t);
        if !self.cache.contains_key(&key) {
            let set = self.compute(t);
            self.cache.insert(key.clone(), set);
        }
        Ok(&self.cache[&key])
    }

    fn sub(&mut self, t: &Term) -> Vec<Term> {
        let key = canonical(t);
        if let Some(s) = self.cache.get(&key) {
            return s.items.clone();
        }
        let set = self.compute(t);
        let items = set.items.clone();
        self.cache.insert(key, set);
        items
    }

    fn compute(&mut self, t: &Term) -> TermSet {
        let mut out = TermSet::new();
        match t {
            Term::Var(_) | Term::Unit | Term::Nil | Term::Cons | Term::Lrec => {
                out.insert(t.clone());
            }
            Term::Lam(x, ann, b) => {
                for b2 in self.sub(b) {
                    out.insert(Term::Lam(x.clone(), ann.clone(), Box::new(b2)));
                }
            }
            Term::Catch(a, b) => {
                for b2 in self.sub(b) {
                    out.insert(Term::catch(a.clone(), b2));
                }
                match &**b {
                    Term::Throw(c, s) if c == a => {
                        for s2 in self.sub(s) {
                            out.insert(Term::catch(a.clone(), s2));
                        }
                    }
                    Term::Throw(c, v) if is_value(v) && !cont_free_in(a, v) => {
                        for v2 in self.sub(v) {
                            out.insert(Term::throw(c.clone(), v2));
                        }
                    }
                    v if is_value(v) && !cont_free_in(a, v) => {
                        for v2 in self.sub(v) {
                            out.insert(v2);
                        }
                    }
                    _ => {}
                }
            }
            Term::Throw(..) => {}
            Term::App(f, a) => {
                let fs = self.sub(f);
                let as_ = self.sub(a);
                for f2 in &fs {
                    for a2 in &as_ {
                        out.insert(Term::app(f2.clone(), a2.clone()));
                    }
                }
                if let Term::Lam(x, _, body) = &**f {
                    if is_value(a) {
                        for b2 in self.sub(body) {
                            for a2 in &as_ {
                                out.insert(subst(&b2, x, a2));
                            }
                        }
                    }
                }
                if let Some((r, s, l)) = t.as_lrec() {
                    if is_value(r) && is_value(s) {
                        if let Term::Nil = l {
                            for r2 in self.sub(r) {
                                out.insert(r2);
                            }
                        } else if let Some((h, tl)) = l.as_cons() {
                            if is_value(h) && is_value(tl) {
                                let (rs, ss, hs, ts) = (self.sub(r), self.sub(s), self.sub(h), self.sub(tl));
                                for r2 in &rs {
                                    for s2 in &ss {
                                        for h2 in &hs {
                                            for t2 in &ts {
                                                let rec = Term::lrec(r2.clone(), s2.clone(), t2.clone());
                                                out.insert(Term::apps(s2.clone(), [h2.clone(), t2.clone(), rec]));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        // E[throw a s] => throw a s'
        for view in throw_decompositions(t) {
            if let Term::Throw(a, s) = &view.hole_subject {
                for s2 in self.sub(s) {
                    out.insert(Term::throw(a.clone(), s2));
                }
            }
        }
        out
    }
}

/// `{t' | t => t'}` modulo alpha-equivalence.
pub fn parallel_reducts(t: &Term, node_budget: usize) -> Result<Vec<Term>, ConfluenceError> {
    Ok(ParallelReducer::new().reducts(t, node_budget)?.items.clone())
}

/// Whether `s => t`.
pub fn is_parallel_step(s: &Term, t: &Term, node_budget: usize) -> Result<bool, ConfluenceError> {
    Ok(ParallelReducer::new().reducts(s, node_budget)?.contains(t))
}

/// A verified parallel reduction step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelStep {
    source: Term,
    target: Term,
}

impl ParallelStep {
    pub fn new(source: Term, target: Term, node_budget: usize) -> Result<Self, ConfluenceError> {
        if is_parallel_step(&source, &target, node_budget)? {
            Ok(ParallelStep { source, target })
        } else {
            Err(ConfluenceError::NotAParallelStep)
        }
    }

    pub fn source(&self) -> &Term {
        &self.source
    }

    pub fn target(&self) -> &Term {
        &self.target
    }
}

/// Iterates the complete development from `t` until a fixpoint, `max_rounds`
/// iterations, or an iterate larger than `node_budget`.
fn development_sequence(t: &Term, max_rounds: usize, node_budget: usize) -> Vec<(Term, Term)> {
    let mut seq = vec![(t.clone(), canonical(t))];
    for _ in 0..max_rounds {
        let last = &seq.last().unwrap().0;
        if size(last) > node_budget {
            break;
        }
        let next = complete_development(last);
        let key = canonical(&next);
        if key == seq.last().unwrap().1 {
            break;
        }
        seq.push((next, key));
    }
    seq
}

/// Searches for a common reduct by iterating the complete development on both
/// sides up to `max_rounds` times. The two sequences are first compared
/// round by round (a sequence that reached its fixpoint stays there), so
/// `join(t, t)` is `t`; failing that, any element shared by the two
/// sequences is returned, preferring the fewest combined rounds.
pub fn join(t1: &Term, t2: &Term, max_rounds: usize, node_budget: usize) -> Option<Term> {
    let left = development_sequence(t1, max_rounds, node_budget);
    let right = development_sequence(t2, max_rounds, node_budget);
    let at = |seq: &[(Term, Term)], k: usize| seq.len().min(k + 1) - 1;
    for k in 0..left.len().max(right.len()) {
        let (l, r) = (&left[at(&left, k)], &right[at(&right, k)]);
        if l.1 == r.1 {
            return Some(l.0.clone());
        }
    }
    let index: HashMap<&Term, usize> = right.iter().enumerate().map(|(j, (_, k))| (k, j)).collect();
    left.iter()
        .enumerate()
        .filter_map(|(i, (t, k))| index.get(k).map(|&j| (i + j, t)))
        .min_by_key(|(score, _)| *score)
        .map(|(_, t)| t.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_term;
    use crate::syntax::alpha_eq;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn set(ts: &[&str]) -> TermSet {
        ts.iter().map(|s| p(s)).collect()
    }

    fn same(a: &[Term], b: &TermSet) -> bool {
        a.len() == b.len() && a.iter().all(|t| b.contains(t))
    }

    #[test]
    fn decompositions() {
        let t = p("(throw a (throw b ())) x");
        let views = throw_decompositions(&t);
        assert_eq!(views.len(), 2);
        assert_eq!(views[0].frames, vec![Frame::AppFun(p("x"))]);
        assert_eq!(views[1].hole_subject, p("throw b ()"));
        for v in &views {
            assert_eq!(v.reassemble(), t);
        }
        let t = p("(\\x. x) (throw a ())");
        assert!(matches!(throw_decompositions(&t)[0].frames[0], Frame::AppArg(_)));
        // the argument is not entered while the function is not a value
        assert!(throw_decompositions(&p("(f x) (throw a ())")).is_empty());
        assert!(throw_decompositions(&p("catch a. throw a ()")).is_empty());
    }

    #[test]
    fn complete_development_examples() {
        assert_eq!(complete_development(&p("(\\x. x) ()")), Term::Unit);
        assert_eq!(complete_development(&p("catch a. throw a ()")), p("catch a. ()"));
        assert_eq!(complete_development(&p("throw a throw b ()")), p("throw b ()"));
        assert_eq!(complete_development(&p("lrec #1 s []")), p("#1"));
        assert_eq!(complete_development(&p("lrec r s [h]")), p("s h [] (lrec r s [])"));
        assert_eq!(complete_development(&p("catch a. throw b ()")), p("throw b ()"));
        assert_eq!(complete_development(&p("catch a. \\x. throw a x")), p("catch a. \\x. throw a x"));
        assert_eq!(complete_development(&p("(throw a ((\\x. x) ())) y")), p("throw a ()"));
        assert_eq!(complete_development(&p("\\y. (\\x. x) y")), p("\\y. y"));
    }

    #[test]
    fn parallel_reduct_examples() {
        assert!(same(&parallel_reducts(&p("()"), 14).unwrap(), &set(&["()"])));
        assert!(same(&parallel_reducts(&p("(\\x. x) ()"), 14).unwrap(), &set(&["(\\x. x) ()", "()"])));
        let rs = parallel_reducts(&p("throw a1 throw a2 throw a3 ()"), 14).unwrap();
        let rs: TermSet = rs.into_iter().collect();
        for expected in ["throw a1 throw a2 throw a3 ()", "throw a2 throw a3 ()", "throw a3 ()", "throw a1 throw a3 ()"] {
            assert!(rs.contains(&p(expected)), "{expected}");
        }
        // outer throws are erased, never inner ones
        assert!(!rs.contains(&p("throw a1 ()")));
        assert_eq!(rs.len(), 4);
        assert!(matches!(
            parallel_reducts(&p("(\\x. x) ()"), 3),
            Err(ConfluenceError::BudgetExceeded { size: 4, budget: 3 })
        ));
    }

    #[test]
    fn is_parallel_step_examples() {
        let t = p("catch a. throw a ((\\x. x) ())");
        assert!(is_parallel_step(&t, &t, 14).unwrap());
        assert!(is_parallel_step(&p("(\\x. x) ()"), &p("()"), 14).unwrap());
        assert!(!is_parallel_step(&p("()"), &p("(\\x. x) ()"), 14).unwrap());
        // two redexes at once
        assert!(is_parallel_step(&t, &p("catch a. ()"), 14).unwrap());
        assert!(ParallelStep::new(p("()"), p("[]"), 14).is_err());
    }

    #[test]
    fn complete_development_is_a_parallel_reduct() {
        for src in [
            "throw a throw b ()",
            "(throw a ((\\x. x) ())) y",
            "catch a. throw a throw b ()",
            "lrec () (\\h. \\t. \\r. r) [()]",
            "(\\x. catch a. x) (\\y. throw a y)",
        ] {
            let t = p(src);
            assert!(is_parallel_step(&t, &complete_development(&t), 30).unwrap(), "{src}");
        }
    }

    #[test]
    fn join_examples() {
        let t = p("\\x. x");
        assert!(alpha_eq(&join(&t, &t, 4, 100).unwrap(), &t));
        assert_eq!(join(&p("()"), &p("(\\x. x) ()"), 4, 100), Some(Term::Unit));
        assert_eq!(join(&p("catch a. ()"), &p("catch a. throw a ()"), 4, 100), Some(Term::Unit));
        assert_eq!(join(&p("()"), &p("[]"), 4, 100), None);
        // with one round the sequences only meet at different depths
        let w = join(&p("catch a. throw a ()"), &p("catch a. ()"), 1, 100);
        assert_eq!(w, Some(p("catch a. ()")));
    }
}
