//! Root contraction, full redex enumeration and a deterministic
//! call-by-value evaluator.

use std::fmt;

use crate::syntax::{cont_free_in, is_value, subst, Term};

/// The seven reduction rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleTag {
    BetaV,
    ThrowProp,
    Catch1,
    Catch2,
    Catch3,
    LrecNil,
    LrecCons,
}

impl RuleTag {
    pub const ALL: [RuleTag; 7] = [
        RuleTag::BetaV,
        RuleTag::ThrowProp,
        RuleTag::Catch1,
        RuleTag::Catch2,
        RuleTag::Catch3,
        RuleTag::LrecNil,
        RuleTag::LrecCons,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleTag::BetaV => "beta_v",
            RuleTag::ThrowProp => "throw",
            RuleTag::Catch1 => "catch_1",
            RuleTag::Catch2 => "catch_2",
            RuleTag::Catch3 => "catch_3",
            RuleTag::LrecNil => "lrec_nil",
            RuleTag::LrecCons => "lrec_cons",
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One rule application somewhere inside a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionEvent {
    pub rule: RuleTag,
    /// Child indices from the root to the redex.
    pub path: Vec<usize>,
    /// The whole term after the contraction.
    pub result: Term,
}

/// Tries one rule at the root of `t`.
fn try_rule(rule: RuleTag, t: &Term) -> Option<Term> {
    match (rule, t) {
        (RuleTag::Catch1, Term::Catch(a, b)) => match &**b {
            Term::Throw(c, p) if c == a => Some(Term::catch(a.clone(), (**p).clone())),
            _ => None,
        },
        (RuleTag::Catch2, Term::Catch(a, b)) => match &**b {
            Term::Throw(c, v) if c != a && is_value(v) && !cont_free_in(a, v) => Some((**b).clone()),
            _ => None,
        },
        (RuleTag::Catch3, Term::Catch(a, v)) if is_value(v) && !cont_free_in(a, v) => Some((**v).clone()),
        (RuleTag::BetaV, Term::App(f, v)) => match &**f {
            Term::Lam(x, _, body) if is_value(v) => Some(subst(body, x, v)),
            _ => None,
        },
        (RuleTag::LrecNil, _) => match t.as_lrec() {
            Some((r, s, Term::Nil)) if is_value(r) && is_value(s) => Some(r.clone()),
            _ => None,
        },
        (RuleTag::LrecCons, _) => {
            let (r, s, l) = t.as_lrec()?;
            let (h, tl) = l.as_cons()?;
            if ![r, s, h, tl].iter().all(|x| is_value(x)) {
                return None;
            }
            let rec = Term::lrec(r.clone(), s.clone(), tl.clone());
            Some(Term::apps(s.clone(), [h.clone(), tl.clone(), rec]))
        }
        (RuleTag::ThrowProp, Term::App(f, a)) => match (&**f, &**a) {
            (Term::Throw(..), _) => Some((**f).clone()),
            (v, Term::Throw(..)) if is_value(v) => Some((**a).clone()),
            _ => None,
        },
        (RuleTag::ThrowProp, Term::Throw(_, p)) if p.is_throw() => Some((**p).clone()),
        _ => None,
    }
}

const MATCH_ORDER: [RuleTag; 7] = [
    RuleTag::Catch1,
    RuleTag::Catch2,
    RuleTag::Catch3,
    RuleTag::BetaV,
    RuleTag::LrecNil,
    RuleTag::LrecCons,
    RuleTag::ThrowProp,
];

/// Contracts the root of `t` if it is a redex.
pub fn contract(t: &Term) -> Option<(RuleTag, Term)> {
    MATCH_ORDER.iter().find_map(|&r| try_rule(r, t).map(|res| (r, res)))
}

/// All rules whose left-hand side matches the root of `t`. At most one for
/// any term.
pub fn matching_rules(t: &Term) -> Vec<RuleTag> {
    MATCH_ORDER.iter().copied().filter(|&r| try_rule(r, t).is_some()).collect()
}

/// Every one-step reduct of `t`, one event per redex position, in pre-order
/// (a redex is listed before the redexes inside it, left before right).
pub fn enumerate_redexes(t: &Term) -> Vec<ReductionEvent> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect(t, t, &mut path, &mut out);
    out
}

fn collect(root: &Term, t: &Term, path: &mut Vec<usize>, out: &mut Vec<ReductionEvent>) {
    if let Some((rule, contractum)) = contract(t) {
        out.push(ReductionEvent { rule, path: path.clone(), result: root.replace_at(path, contractum) });
    }
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i);
        collect(root, c, path, out);
        path.pop();
    }
}

/// Where call-by-value evaluation continues below the root of `t`, if
/// anywhere: the function of an application until it is a value, then the
/// argument; the payload of a throw; the body of a catch.
fn eval_child(t: &Term) -> Option<(usize, &Term)> {
    match t {
        Term::App(f, _) if !is_value(f) => Some((0, f)),
        Term::App(_, a) if !is_value(a) => Some((1, a)),
        Term::Throw(_, p) => Some((0, p)),
        Term::Catch(_, b) => Some((0, b)),
        _ => None,
    }
}

/// The standard call-by-value step: the outermost redex on the evaluation
/// path. Never reduces under a lambda.
pub fn step_cbv(t: &Term) -> Option<ReductionEvent> {
    let mut path = Vec::new();
    let mut cur = t;
    loop {
        if let Some((rule, contractum)) = contract(cur) {
            return Some(ReductionEvent { rule, result: t.replace_at(&path, contractum), path });
        }
        let (i, next) = eval_child(cur)?;
        path.push(i);
        cur = next;
    }
}

pub const DEFAULT_FUEL: u64 = 100_000;
pub const TRACE_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutcomeKind {
    Value(Term),
    UncaughtThrow { cont: String, payload: Term },
    OutOfFuel(Term),
    /// A non-value normal form that is not a throw of a value (only reachable
    /// for ill-typed terms).
    IllFormed(Term),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub steps: u64,
    pub trace: Option<Vec<ReductionEvent>>,
    /// Set when more than [`TRACE_CAP`] events happened; the trace holds the
    /// first ones only.
    pub trace_truncated: bool,
}

impl Outcome {
    pub fn value(&self) -> Option<&Term> {
        match &self.kind {
            OutcomeKind::Value(v) => Some(v),
            _ => None,
        }
    }

    /// The final (or partial, when out of fuel) term.
    pub fn term(&self) -> &Term {
        match &self.kind {
            OutcomeKind::Value(t) | OutcomeKind::OutOfFuel(t) | OutcomeKind::IllFormed(t) => t,
            OutcomeKind::UncaughtThrow { payload, .. } => payload,
        }
    }
}

/// Runs [`step_cbv`] until no step applies or `fuel` steps were taken.
pub fn evaluate(t: &Term, fuel: u64, keep_trace: bool) -> Outcome {
    let mut cur = t.clone();
    let mut steps = 0u64;
    let mut trace = keep_trace.then(Vec::new);
    let mut truncated = false;
    loop {
        let Some(ev) = step_cbv(&cur) else {
            let kind = match cur {
                v if is_value(&v) => OutcomeKind::Value(v),
                Term::Throw(cont, p) if is_value(&p) => OutcomeKind::UncaughtThrow { cont, payload: *p },
                other => OutcomeKind::IllFormed(other),
            };
            return Outcome { kind, steps, trace, trace_truncated: truncated };
        };
        if steps == fuel {
            return Outcome { kind: OutcomeKind::OutOfFuel(cur), steps, trace, trace_truncated: truncated };
        }
        steps += 1;
        cur = ev.result.clone();
        if let Some(tr) = trace.as_mut() {
            if tr.len() < TRACE_CAP {
                tr.push(ev);
            } else {
                truncated = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_term;
    use crate::syntax::alpha_eq;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn root_contractions() {
        assert_eq!(contract(&p("(\\x. x) ()")), Some((RuleTag::BetaV, Term::Unit)));
        let (rule, res) = contract(&p("lrec #1 s []")).unwrap();
        assert_eq!((rule, res), (RuleTag::LrecNil, p("#1")));
        let (rule, res) = contract(&p("(throw a ()) []")).unwrap();
        assert_eq!((rule, res), (RuleTag::ThrowProp, p("throw a ()")));
        assert_eq!(contract(&p("catch a. throw b (\\x. throw a x)")), None);
        assert_eq!(contract(&p("catch a. throw b ()")).unwrap().0, RuleTag::Catch2);
        assert_eq!(contract(&p("catch a. throw a ((\\x. x) ())")).unwrap().0, RuleTag::Catch1);
        assert_eq!(contract(&p("catch a. \\x. throw a x")), None);
        assert_eq!(contract(&p("catch a. [()]")), Some((RuleTag::Catch3, p("[()]"))));
        let (rule, res) = contract(&p("lrec r s [h]")).unwrap();
        assert_eq!(rule, RuleTag::LrecCons);
        assert_eq!(res, p("s h [] (lrec r s [])"));
        assert_eq!(contract(&p("throw a throw b ()")).unwrap().0, RuleTag::ThrowProp);
        assert_eq!(contract(&p("f (throw a ())")).unwrap().0, RuleTag::ThrowProp);
        assert_eq!(contract(&p("(f ()) (throw a ())")), None);
        assert_eq!(contract(&p("(\\x. x) (throw a ())")).unwrap().0, RuleTag::ThrowProp);
        assert_eq!(contract(&p("x")), None);
    }

    #[test]
    fn redex_enumeration() {
        assert!(enumerate_redexes(&p("\\x. x")).is_empty());

        let evs = enumerate_redexes(&p("cons (throw a r) t"));
        assert_eq!(evs.len(), 1);
        assert_eq!(evs[0].rule, RuleTag::ThrowProp);
        assert_eq!(evs[0].path, vec![0]);
        assert_eq!(evs[0].result, p("(throw a r) t"));

        let evs = enumerate_redexes(&p("catch a. throw a ((\\x. x) ())"));
        let rules: Vec<_> = evs.iter().map(|e| e.rule).collect();
        assert_eq!(rules, [RuleTag::Catch1, RuleTag::BetaV]);
        assert!(alpha_eq(&evs[0].result, &p("catch a. (\\x. x) ()")));
        assert!(alpha_eq(&evs[1].result, &p("catch a. throw a ()")));
        assert_eq!(evs[1].path, vec![0, 0]);
    }

    #[test]
    fn enumeration_descends_under_binders() {
        let evs = enumerate_redexes(&p("\\y. (\\x. x) y"));
        assert_eq!(evs.len(), 1);
        assert_eq!(evs[0].result, p("\\y. y"));
    }

    #[test]
    fn cbv_steps() {
        let ev = step_cbv(&p("(\\x. x) ((\\y. y) ())")).unwrap();
        assert_eq!(ev.rule, RuleTag::BetaV);
        assert_eq!(ev.path, vec![1]);
        let ev = step_cbv(&p("catch a. cons () []")).unwrap();
        assert_eq!((ev.rule, ev.result), (RuleTag::Catch3, p("[()]")));
        assert_eq!(step_cbv(&p("\\x. (\\y. y) ()")), None);
        assert_eq!(step_cbv(&p("throw b ()")), None);
        // function position first
        let ev = step_cbv(&p("((\\x. x) (\\y. y)) ((\\z. z) ())")).unwrap();
        assert_eq!(ev.path, vec![0]);
    }

    #[test]
    fn evaluation_outcomes() {
        let o = evaluate(&p("throw b ()"), 10, false);
        assert_eq!(o.kind, OutcomeKind::UncaughtThrow { cont: "b".into(), payload: Term::Unit });
        assert_eq!(o.steps, 0);

        let omega = "(\\x. x x) (\\x. x x)";
        let o = evaluate(&p(omega), 50, false);
        assert!(matches!(o.kind, OutcomeKind::OutOfFuel(_)));
        assert_eq!(o.steps, 50);

        let o = evaluate(&p("(\\x. x) ()"), 0, false);
        assert!(matches!(o.kind, OutcomeKind::OutOfFuel(_)));
        let o = evaluate(&p("(\\x. x) ()"), 1, true);
        assert_eq!(o.kind, OutcomeKind::Value(Term::Unit));
        assert_eq!(o.trace.unwrap().len(), 1);

        let o = evaluate(&p("() ()"), 10, false);
        assert!(matches!(o.kind, OutcomeKind::IllFormed(_)));

        let o = evaluate(&p("catch a. (\\h. cons () h) (throw a [])"), 100, false);
        assert_eq!(o.value(), Some(&Term::Nil));
        assert_eq!(o.steps, 3);
    }

    #[test]
    fn trace_is_capped() {
        let o = evaluate(&p("(\\x. x x) (\\x. x x)"), TRACE_CAP as u64 + 5, true);
        assert_eq!(o.trace.as_ref().unwrap().len(), TRACE_CAP);
        assert!(o.trace_truncated);
    }
}
