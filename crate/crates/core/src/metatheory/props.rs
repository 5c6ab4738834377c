use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::gen::{gen_term, GenConfig};
use super::minimize::minimize;
use crate::confluence::{complete_development, ConfluenceError, ParallelReducer, TermSet};
use crate::reduction::{enumerate_redexes, evaluate, step_cbv, OutcomeKind, RuleTag, DEFAULT_FUEL};
use crate::surface::print;
use crate::syntax::{canonical, free_vars, is_value, size, Term, Type};
use crate::typing::{derive, infer, replay, Derivation, TypingEnv};

/// Node budget for parallel-reduct enumeration in the confluence properties.
pub const CONFLUENCE_BUDGET: usize = 64;
/// Cap on distinct terms when exploring a reduction graph.
pub const GRAPH_CAP: usize = 20_000;
/// Typed terms up to this size get their full reduction graph explored by
/// the strong normalization property; larger ones are evaluated with fuel.
pub const SN_GRAPH_MAX_SIZE: usize = 12;
/// Steps of the evaluation path checked by [`Property::Progress`].
const PROGRESS_PATH: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    SubjectReduction,
    Progress,
    Diamond,
    RedSubsetPred,
    PredSubsetRedd,
    TakahashiMpred,
    StrongNormalization,
    ValueShapes,
    FcvClosed,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::SubjectReduction,
        Property::Progress,
        Property::Diamond,
        Property::RedSubsetPred,
        Property::PredSubsetRedd,
        Property::TakahashiMpred,
        Property::StrongNormalization,
        Property::ValueShapes,
        Property::FcvClosed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::SubjectReduction => "SubjectReduction",
            Property::Progress => "Progress",
            Property::Diamond => "Diamond",
            Property::RedSubsetPred => "RedSubsetPred",
            Property::PredSubsetRedd => "PredSubsetRedd",
            Property::TakahashiMpred => "TakahashiMpred",
            Property::StrongNormalization => "StrongNormalization",
            Property::ValueShapes => "ValueShapes",
            Property::FcvClosed => "FcvClosed",
        }
    }

    /// Short command-line name.
    pub fn short_name(self) -> &'static str {
        match self {
            Property::SubjectReduction => "sr",
            Property::Progress => "progress",
            Property::Diamond => "diamond",
            Property::RedSubsetPred => "red-pred",
            Property::PredSubsetRedd => "pred-redd",
            Property::TakahashiMpred => "takahashi",
            Property::StrongNormalization => "sn",
            Property::ValueShapes => "values",
            Property::FcvClosed => "fcv",
        }
    }

    /// Whether the property is checked on closed well-typed terms.
    pub fn typed(self) -> bool {
        !matches!(
            self,
            Property::Diamond | Property::RedSubsetPred | Property::PredSubsetRedd | Property::TakahashiMpred
        )
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Property::ALL
            .into_iter()
            .find(|p| p.short_name() == s || p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let known: Vec<_> = Property::ALL.iter().map(|p| p.short_name()).collect();
                format!("unknown property `{s}` (known: {})", known.join(", "))
            })
    }
}

/// Result of checking one term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseResult {
    Pass,
    Fail(String),
    /// A resource bound was hit before the check could decide.
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub seed: u64,
    /// Minimized counterexample.
    pub term: Term,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: Property,
    pub cases_run: usize,
    pub failures: Vec<Failure>,
    /// Seeds whose check hit a resource bound, with the reason.
    pub inconclusive: Vec<(u64, String)>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Machine-readable form: a `PROP` header line, then one `FAIL` line per
    /// failure and one `INCONCLUSIVE` line per undecided case.
    pub fn render_lines(&self) -> String {
        let mut out = format!("PROP {} CASES {} FAILURES {}\n", self.property, self.cases_run, self.failures.len());
        for f in &self.failures {
            out += &format!("FAIL seed={} term={}\n", f.seed, print(&f.term));
        }
        for (seed, why) in &self.inconclusive {
            out += &format!("INCONCLUSIVE seed={seed} {why}\n");
        }
        out
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "ok" } else { "FAILED" };
        writeln!(
            f,
            "{}: {} cases, {} failures, {} inconclusive: {verdict}",
            self.property,
            self.cases_run,
            self.failures.len(),
            self.inconclusive.len()
        )?;
        for fail in &self.failures {
            writeln!(f, "  seed {}: {}\n    {}", fail.seed, print(&fail.term), fail.detail)?;
        }
        Ok(())
    }
}

/// Runs `p` on `cases` generated terms with seeds `cfg.seed, cfg.seed + 1, ...`.
/// The generator mode (typed or not) is dictated by the property. Cases run
/// in parallel; the report lists failures in seed order.
pub fn run_property(p: Property, cases: usize, cfg: &GenConfig) -> PropertyReport {
    let base = GenConfig { typed: p.typed(), ..cfg.clone() };
    let results: Vec<(u64, Term, CaseResult)> = (0..cases as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base.seed.wrapping_add(i);
            let t = gen_term(&base.with_seed(seed));
            let r = check_case(p, &t);
            (seed, t, r)
        })
        .collect();
    let mut report = PropertyReport { property: p, cases_run: cases, failures: Vec::new(), inconclusive: Vec::new() };
    for (seed, t, r) in results {
        match r {
            CaseResult::Pass => {}
            CaseResult::Inconclusive(why) => report.inconclusive.push((seed, why)),
            CaseResult::Fail(_) => {
                let small = minimize(&t, |u| matches!(check_case(p, u), CaseResult::Fail(_)));
                let detail = match check_case(p, &small) {
                    CaseResult::Fail(d) => d,
                    _ => unreachable!("minimize preserves the failure"),
                };
                report.failures.push(Failure { seed, term: small, detail });
            }
        }
    }
    report
}

/// Checks `p` on a single term.
pub fn check_case(p: Property, t: &Term) -> CaseResult {
    match p {
        Property::SubjectReduction => subject_reduction(t),
        Property::Progress => progress(t),
        Property::Diamond => diamond(t),
        Property::RedSubsetPred => red_subset_pred(t),
        Property::PredSubsetRedd => pred_subset_redd(t),
        Property::TakahashiMpred => takahashi(t),
        Property::StrongNormalization => strong_normalization(t),
        Property::ValueShapes => value_shapes(t),
        Property::FcvClosed => fcv_closed(t),
    }
}

fn closed_type(t: &Term) -> Result<Type, CaseResult> {
    infer(&TypingEnv::new(), t).map_err(|e| CaseResult::Inconclusive(format!("not closed and well-typed: {e}")))
}

fn subject_reduction(t: &Term) -> CaseResult {
    let ty = match closed_type(t) {
        Ok(ty) => ty,
        Err(r) => return r,
    };
    for ev in enumerate_redexes(t) {
        let typed = derive(&TypingEnv::new(), &ev.result, Some(&ty))
            .map_err(|e| e.to_string())
            .and_then(|d| replay(&TypingEnv::new(), &ev.result, &d));
        if let Err(e) = typed {
            return CaseResult::Fail(format!("[{}] reduct {} does not have type {ty}: {e}", ev.rule, print(&ev.result)));
        }
    }
    CaseResult::Pass
}

fn progress(t: &Term) -> CaseResult {
    if let Err(r) = closed_type(t) {
        return r;
    }
    let mut cur = t.clone();
    for _ in 0..PROGRESS_PATH {
        if is_value(&cur) {
            return CaseResult::Pass;
        }
        match step_cbv(&cur) {
            Some(ev) => cur = ev.result,
            None => return CaseResult::Fail(format!("stuck non-value {}", print(&cur))),
        }
    }
    CaseResult::Pass
}

/// Parallel reducts of `t` and of each of them, sharing one cache.
struct Confl {
    pr: ParallelReducer,
}

impl Confl {
    fn new() -> Self {
        Confl { pr: ParallelReducer::new() }
    }

    fn reducts(&mut self, t: &Term) -> Result<TermSet, CaseResult> {
        self.pr.reducts(t, CONFLUENCE_BUDGET).cloned().map_err(budget)
    }
}

fn budget(e: ConfluenceError) -> CaseResult {
    CaseResult::Inconclusive(e.to_string())
}

fn red_subset_pred(t: &Term) -> CaseResult {
    let mut c = Confl::new();
    let prs = match c.reducts(t) {
        Ok(s) => s,
        Err(r) => return r,
    };
    for ev in enumerate_redexes(t) {
        if !prs.contains(&ev.result) {
            return CaseResult::Fail(format!(
                "[{}] at {:?}: {} is not a parallel reduct",
                ev.rule,
                ev.path,
                print(&ev.result)
            ));
        }
    }
    CaseResult::Pass
}

fn pred_subset_redd(t: &Term) -> CaseResult {
    let mut c = Confl::new();
    let prs = match c.reducts(t) {
        Ok(s) => s,
        Err(r) => return r,
    };
    for t2 in &prs {
        match reachable(t, t2, GRAPH_CAP) {
            Some(true) => {}
            Some(false) => return CaseResult::Fail(format!("parallel reduct {} is not reachable", print(t2))),
            None => return CaseResult::Inconclusive(format!("reachability of {} exceeded the graph cap", print(t2))),
        }
    }
    CaseResult::Pass
}

fn takahashi(t: &Term) -> CaseResult {
    let mut c = Confl::new();
    let prs = match c.reducts(t) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let m = complete_development(t);
    if !prs.contains(&m) {
        return CaseResult::Fail(format!("complete development {} is not a parallel reduct", print(&m)));
    }
    for t2 in &prs {
        match c.reducts(t2) {
            Ok(s) if s.contains(&m) => {}
            Ok(_) => {
                return CaseResult::Fail(format!(
                    "parallel reduct {} does not reach complete development {}",
                    print(t2),
                    print(&m)
                ))
            }
            Err(r) => return r,
        }
    }
    CaseResult::Pass
}

fn diamond(t: &Term) -> CaseResult {
    let mut c = Confl::new();
    let prs = match c.reducts(t) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let m = complete_development(t);
    let mut next = Vec::with_capacity(prs.len());
    for t2 in &prs {
        match c.reducts(t2) {
            Ok(s) => next.push(s),
            Err(r) => return r,
        }
    }
    for (i, s1) in next.iter().enumerate() {
        for (j, s2) in next.iter().enumerate().skip(i) {
            if !s1.intersects(s2) {
                let (t1, t2) = (&prs.iter().as_slice()[i], &prs.iter().as_slice()[j]);
                return CaseResult::Fail(format!("{} and {} have no common parallel reduct", print(t1), print(t2)));
            }
            if !(s1.contains(&m) && s2.contains(&m)) {
                let (t1, t2) = (&prs.iter().as_slice()[i], &prs.iter().as_slice()[j]);
                return CaseResult::Fail(format!(
                    "{} and {} do not meet at the complete development {}",
                    print(t1),
                    print(t2),
                    print(&m)
                ));
            }
        }
    }
    CaseResult::Pass
}

/// Outcome of exploring every reduction sequence from a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphVerdict {
    /// The graph is finite and acyclic; `nodes` distinct terms up to alpha.
    Finite { nodes: usize, longest: usize },
    /// A reduction cycle, as the sequence of terms from the cycle's entry.
    Cycle(Vec<Term>),
    /// More than the cap of distinct terms.
    Overflow,
}

/// Depth-first exploration of the full one-step reduction graph of `t`,
/// identifying alpha-equivalent terms.
pub fn explore_reduction_graph(t: &Term, cap: usize) -> GraphVerdict {
    enum Mark {
        OnStack,
        Done(usize),
    }
    struct Frame {
        key: Term,
        term: Term,
        succs: Vec<Term>,
        next: usize,
        longest: usize,
    }
    let frame = |term: &Term| Frame {
        key: canonical(term),
        term: term.clone(),
        succs: enumerate_redexes(term).into_iter().map(|e| e.result).collect(),
        next: 0,
        longest: 0,
    };
    let mut marks: HashMap<Term, Mark> = HashMap::new();
    let root = frame(t);
    marks.insert(root.key.clone(), Mark::OnStack);
    let mut stack = vec![root];
    while let Some(top) = stack.last_mut() {
        if top.next == top.succs.len() {
            let done = stack.pop().expect("nonempty");
            marks.insert(done.key, Mark::Done(done.longest));
            match stack.last_mut() {
                Some(parent) => parent.longest = parent.longest.max(done.longest + 1),
                None => return GraphVerdict::Finite { nodes: marks.len(), longest: done.longest },
            }
            continue;
        }
        let succ = top.succs[top.next].clone();
        top.next += 1;
        let key = canonical(&succ);
        match marks.get(&key) {
            Some(Mark::OnStack) => {
                let from = stack.iter().position(|f| f.key == key).expect("on stack");
                return GraphVerdict::Cycle(stack[from..].iter().map(|f| f.term.clone()).collect());
            }
            Some(Mark::Done(d)) => {
                let d = *d;
                top.longest = top.longest.max(d + 1);
            }
            None => {
                if marks.len() >= cap {
                    return GraphVerdict::Overflow;
                }
                let f = frame(&succ);
                marks.insert(key, Mark::OnStack);
                stack.push(f);
            }
        }
    }
    unreachable!("the root frame returns")
}

/// Whether `to` is reachable from `from` by zero or more steps, up to alpha.
/// `None` when more than `cap` terms were visited without an answer.
pub fn reachable(from: &Term, to: &Term, cap: usize) -> Option<bool> {
    let goal = canonical(to);
    let mut seen: HashSet<Term> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(canonical(from));
    queue.push_back(from.clone());
    while let Some(t) = queue.pop_front() {
        if canonical(&t) == goal {
            return Some(true);
        }
        for ev in enumerate_redexes(&t) {
            if seen.insert(canonical(&ev.result)) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(ev.result);
            }
        }
    }
    Some(false)
}

/// Rules used anywhere in the reduction graph of `t`, exploring at most
/// `cap` terms.
pub fn rules_in_graph(t: &Term, cap: usize) -> BTreeSet<RuleTag> {
    let mut rules = BTreeSet::new();
    let mut seen: HashSet<Term> = HashSet::new();
    let mut queue = VecDeque::from([t.clone()]);
    seen.insert(canonical(t));
    while let Some(t) = queue.pop_front() {
        for ev in enumerate_redexes(&t) {
            rules.insert(ev.rule);
            if seen.len() < cap && seen.insert(canonical(&ev.result)) {
                queue.push_back(ev.result);
            }
        }
    }
    rules
}

fn strong_normalization(t: &Term) -> CaseResult {
    if let Err(r) = closed_type(t) {
        return r;
    }
    if size(t) <= SN_GRAPH_MAX_SIZE {
        match explore_reduction_graph(t, GRAPH_CAP) {
            GraphVerdict::Cycle(c) => {
                let shown: Vec<_> = c.iter().map(print).collect();
                return CaseResult::Fail(format!("reduction cycle: {}", shown.join(" -> ")));
            }
            GraphVerdict::Overflow => {
                return CaseResult::Inconclusive(format!("reduction graph exceeds {GRAPH_CAP} terms"))
            }
            GraphVerdict::Finite { .. } => {}
        }
    }
    let out = evaluate(t, DEFAULT_FUEL, false);
    match out.kind {
        OutcomeKind::OutOfFuel(_) => CaseResult::Fail(format!("no value after {} steps", out.steps)),
        _ => CaseResult::Pass,
    }
}

/// The shape a closed value of type `ty` must have.
fn has_value_shape(v: &Term, ty: &Type) -> bool {
    match ty {
        Type::Unit => *v == Term::Unit,
        Type::List(_) => v.as_list_literal().is_some(),
        Type::Arrow(..) => {
            let (head, args) = v.spine();
            match head {
                Term::Cons => args.len() <= 1,
                Term::Lrec => args.len() <= 2,
                Term::Lam(..) => args.is_empty(),
                _ => false,
            }
        }
        Type::Meta(_) => false,
    }
}

fn value_shapes(t: &Term) -> CaseResult {
    let ty = match closed_type(t) {
        Ok(ty) => ty,
        Err(r) => return r,
    };
    let out = evaluate(t, DEFAULT_FUEL, false);
    match &out.kind {
        OutcomeKind::Value(v) => {
            if !has_value_shape(v, &ty) {
                return CaseResult::Fail(format!("value {} has the wrong shape for {ty}", print(v)));
            }
            if let Err(e) = derive(&TypingEnv::new(), v, Some(&ty)) {
                return CaseResult::Fail(format!("value {} lost type {ty}: {e}", print(v)));
            }
            CaseResult::Pass
        }
        OutcomeKind::OutOfFuel(_) => CaseResult::Inconclusive(format!("no value after {} steps", out.steps)),
        other => CaseResult::Fail(format!("closed typed term ended in {other:?}")),
    }
}

/// Every value subterm typed at an arrow-free type has no free continuation
/// variables.
fn fcv_closed(t: &Term) -> CaseResult {
    if let Err(r) = closed_type(t) {
        return r;
    }
    let out = evaluate(t, DEFAULT_FUEL, false);
    for subject in [t, out.term()] {
        let d = match derive(&TypingEnv::new(), subject, None) {
            Ok(d) => d,
            Err(e) => return CaseResult::Fail(format!("{} does not typecheck: {e}", print(subject))),
        };
        if let Some(v) = fcv_violation(subject, &d) {
            return CaseResult::Fail(format!("value {} of arrow-free type has free continuation variables", print(v)));
        }
    }
    CaseResult::Pass
}

fn fcv_violation<'t>(t: &'t Term, d: &Derivation) -> Option<&'t Term> {
    if is_value(t) && d.ty.is_arrow_free() && !free_vars(t).cont_vars.is_empty() {
        return Some(t);
    }
    t.children().into_iter().zip(&d.children).find_map(|(c, dc)| fcv_violation(c, dc))
}

/// For each rule, the number of the `cases` typed terms whose reduction graph
/// (explored up to `cap` terms) uses it.
pub fn rule_coverage(cases: usize, cfg: &GenConfig, cap: usize) -> [usize; 7] {
    let base = GenConfig { typed: true, ..cfg.clone() };
    (0..cases as u64)
        .into_par_iter()
        .map(|i| {
            let t = gen_term(&base.with_seed(base.seed.wrapping_add(i)));
            let used = rules_in_graph(&t, cap);
            RuleTag::ALL.map(|r| usize::from(used.contains(&r)))
        })
        .reduce(|| [0; 7], |a, b| std::array::from_fn(|i| a[i] + b[i]))
}
