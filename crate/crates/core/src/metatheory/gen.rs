use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Term, Type};
use crate::typing::{check, infer, TypingEnv};

/// Parameters for random term generation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    /// Upper bound on [`size`](crate::syntax::size) of generated terms. In
    /// typed mode the bound can be exceeded only when no term of the target
    /// type with a principal type fits; for randomly drawn targets that
    /// cannot happen from 6 upwards.
    pub max_size: usize,
    /// Closed well-typed terms (all binders annotated) or arbitrary terms.
    pub typed: bool,
    /// Typed mode only; a random type is drawn when absent.
    pub target_type: Option<Type>,
    /// Maximum number of nested `catch` binders (typed mode).
    pub cont_depth: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 0, max_size: 24, typed: true, target_type: None, cont_depth: 2 }
    }
}

impl GenConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        GenConfig { seed, ..self.clone() }
    }
}

const TYPED_RETRIES: u64 = 8;

/// Generates one term. Deterministic in `cfg`.
///
/// Typed terms are closed and typecheck against `cfg.target_type` (or the
/// drawn type); untyped terms draw their free variables from `x`, `y`, `z`
/// and continuation names from `a`, `b`.
pub fn gen_term(cfg: &GenConfig) -> Term {
    let max_size = cfg.max_size.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if !cfg.typed {
        return Untyped { rng: &mut rng }.term(max_size);
    }
    let target = cfg.target_type.clone().unwrap_or_else(|| random_type(&mut rng, 2));
    for attempt in 0..TYPED_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9)));
        let mut g = Typed { rng: &mut rng, next_var: 0, next_cont: 0, cont_depth: cfg.cont_depth };
        let budget = max_size.max(min_size(&target));
        let t = g.term(&mut Vec::new(), &mut Vec::new(), &target, budget);
        if crate::syntax::size(&t) <= max_size
            && check(&TypingEnv::new(), &t, &target).is_ok()
            && infer(&TypingEnv::new(), &t).is_ok()
        {
            return t;
        }
    }
    let t = inhabitant(&target);
    if infer(&TypingEnv::new(), &t).is_ok() {
        t
    } else {
        Term::app(Term::lam_ann("x", target.clone(), Term::var("x")), t)
    }
}

/// A random simple type of at most `depth` nested constructors.
pub fn random_type(rng: &mut impl Rng, depth: usize) -> Type {
    if depth == 0 {
        return if rng.gen_bool(0.5) { Type::Unit } else { Type::nat() };
    }
    match rng.gen_range(0..10) {
        0..=3 => Type::Unit,
        4..=6 => Type::list(random_type(rng, depth - 1)),
        _ => Type::arrow(random_type(rng, depth - 1), random_type(rng, depth - 1)),
    }
}

fn random_arrow_free(rng: &mut impl Rng, depth: usize) -> Type {
    if depth == 0 || rng.gen_bool(0.5) {
        Type::Unit
    } else {
        Type::list(random_arrow_free(rng, depth - 1))
    }
}

/// Size of [`inhabitant`].
fn min_size(ty: &Type) -> usize {
    match ty {
        Type::Arrow(_, cod) => 1 + min_size(cod),
        _ => 1,
    }
}

/// A smallest closed canonical inhabitant of `ty`.
pub fn inhabitant(ty: &Type) -> Term {
    match ty {
        Type::Unit | Type::Meta(_) => Term::Unit,
        Type::List(_) => Term::Nil,
        Type::Arrow(dom, cod) => Term::lam_ann("x", (**dom).clone(), inhabitant(cod)),
    }
}

/// Splits `total` into parts of at least `mins[i]` each, at random.
fn split(rng: &mut impl Rng, total: usize, mins: &[usize]) -> Vec<usize> {
    let mut parts = mins.to_vec();
    let mut spare = total.saturating_sub(mins.iter().sum());
    while spare > 0 {
        let give = rng.gen_range(1..=spare);
        let i = rng.gen_range(0..parts.len());
        parts[i] += give;
        spare -= give;
    }
    parts
}

#[derive(Clone, Copy, Debug)]
enum Prod {
    Var,
    Atom,
    ConsConst,
    PartialCons,
    PartialLrec,
    ConsLit,
    Lam,
    App,
    Beta,
    Lrec,
    Catch,
    Throw,
}

struct Typed<'r> {
    rng: &'r mut ChaCha8Rng,
    next_var: usize,
    next_cont: usize,
    cont_depth: usize,
}

type Ctx = Vec<(String, Type)>;

/// `ty` as `σ -> [σ] -> [σ]`.
fn cons_shape(ty: &Type) -> Option<&Type> {
    let Type::Arrow(s, rest) = ty else { return None };
    let Type::Arrow(l1, l2) = &**rest else { return None };
    (**l1 == Type::list((**s).clone()) && l1 == l2).then_some(s)
}

impl Typed<'_> {
    fn fresh_var(&mut self) -> String {
        self.next_var += 1;
        format!("x{}", self.next_var - 1)
    }

    fn fresh_cont(&mut self) -> String {
        self.next_cont += 1;
        format!("a{}", self.next_cont - 1)
    }

    fn small_type(&mut self) -> Type {
        random_type(self.rng, 1)
    }

    fn term(&mut self, gamma: &mut Ctx, delta: &mut Ctx, ty: &Type, budget: usize) -> Term {
        let mut prods: Vec<(Prod, u32)> = Vec::new();
        let vars: Vec<&String> = gamma.iter().filter(|(_, t)| t == ty).map(|(x, _)| x).collect();
        if !vars.is_empty() {
            prods.push((Prod::Var, 3));
        }
        if matches!(ty, Type::Unit | Type::List(_)) {
            prods.push((Prod::Atom, 2));
        }
        if cons_shape(ty).is_some() {
            prods.push((Prod::ConsConst, 2));
        }
        if let Type::Arrow(dom, cod) = ty {
            if let Type::List(elem) = &**dom {
                if **dom == **cod && budget >= 2 + min_size(elem) {
                    prods.push((Prod::PartialCons, 2));
                }
                if budget >= 6 + 2 * min_size(cod) {
                    prods.push((Prod::PartialLrec, 1));
                }
            }
            if budget > min_size(cod) {
                prods.push((Prod::Lam, 5));
            }
        }
        if let Type::List(elem) = ty {
            if budget >= 4 + min_size(elem) {
                prods.push((Prod::ConsLit, 3));
            }
        }
        if budget >= 3 + min_size(ty) {
            prods.push((Prod::App, 3));
            prods.push((Prod::Beta, 3));
        }
        if budget >= 8 + 2 * min_size(ty) {
            prods.push((Prod::Lrec, 2));
        }
        if ty.is_arrow_free() && delta.len() < self.cont_depth && budget > min_size(ty) {
            prods.push((Prod::Catch, 3));
        }
        if !delta.is_empty() && budget >= 2 {
            prods.push((Prod::Throw, 4));
        }
        if prods.is_empty() {
            return inhabitant(ty);
        }
        let dist = WeightedIndex::new(prods.iter().map(|p| p.1)).expect("positive weights");
        let prod = prods[dist.sample(self.rng)].0;
        match prod {
            Prod::Var => Term::var(vars.choose(self.rng).expect("nonempty").as_str()),
            Prod::Atom => match ty {
                Type::Unit => Term::Unit,
                _ => Term::Nil,
            },
            Prod::ConsConst => Term::Cons,
            Prod::PartialCons => {
                let Type::Arrow(dom, _) = ty else { unreachable!() };
                let Type::List(elem) = &**dom else { unreachable!() };
                let h = self.term(gamma, delta, elem, budget - 2);
                Term::app(Term::Cons, h)
            }
            Prod::PartialLrec => {
                let Type::Arrow(dom, cod) = ty else { unreachable!() };
                let Type::List(elem) = &**dom else { unreachable!() };
                let parts = split(self.rng, budget - 3, &[min_size(cod), 3 + min_size(cod)]);
                let r = self.term(gamma, delta, cod, parts[0]);
                let s = self.step_fn(gamma, delta, elem, cod, parts[1]);
                Term::apps(Term::Lrec, [r, s])
            }
            Prod::Lam => {
                let Type::Arrow(dom, cod) = ty else { unreachable!() };
                let x = self.fresh_var();
                gamma.push((x.clone(), (**dom).clone()));
                let body = self.term(gamma, delta, cod, budget - 1);
                gamma.pop();
                Term::lam_ann(x, (**dom).clone(), body)
            }
            Prod::ConsLit => {
                let Type::List(elem) = ty else { unreachable!() };
                let parts = split(self.rng, budget - 3, &[min_size(elem), 1]);
                let h = self.term(gamma, delta, elem, parts[0]);
                let t = self.term(gamma, delta, ty, parts[1]);
                Term::cons(h, t)
            }
            Prod::App => {
                let arg_ty = self.small_type();
                let fun_ty = Type::arrow(arg_ty.clone(), ty.clone());
                let mins = [min_size(&fun_ty), min_size(&arg_ty)];
                if budget < 1 + mins[0] + mins[1] {
                    return inhabitant(ty);
                }
                let parts = split(self.rng, budget - 1, &mins);
                let f = self.term(gamma, delta, &fun_ty, parts[0]);
                let a = self.term(gamma, delta, &arg_ty, parts[1]);
                Term::app(f, a)
            }
            Prod::Beta => {
                let arg_ty = self.small_type();
                let mins = [min_size(ty), min_size(&arg_ty)];
                if budget < 2 + mins[0] + mins[1] {
                    return inhabitant(ty);
                }
                let parts = split(self.rng, budget - 2, &mins);
                let a = self.term(gamma, delta, &arg_ty, parts[1]);
                let x = self.fresh_var();
                gamma.push((x.clone(), arg_ty.clone()));
                let body = self.term(gamma, delta, ty, parts[0]);
                gamma.pop();
                Term::app(Term::lam_ann(x, arg_ty, body), a)
            }
            Prod::Lrec => {
                let elem = random_arrow_free(self.rng, 1);
                let list_ty = Type::list(elem.clone());
                let mins = [min_size(ty), 3 + min_size(ty), 1];
                let parts = split(self.rng, budget - 4, &mins);
                let r = self.term(gamma, delta, ty, parts[0]);
                let s = self.step_fn(gamma, delta, &elem, ty, parts[1]);
                let l = self.term(gamma, delta, &list_ty, parts[2]);
                Term::lrec(r, s, l)
            }
            Prod::Catch => {
                let a = self.fresh_cont();
                delta.push((a.clone(), ty.clone()));
                let body = self.term(gamma, delta, ty, budget - 1);
                delta.pop();
                Term::catch(a, body)
            }
            Prod::Throw => {
                let (a, psi) = delta.choose(self.rng).expect("nonempty").clone();
                if budget < 1 + min_size(&psi) {
                    return inhabitant(ty);
                }
                let p = self.term(gamma, delta, &psi, budget - 1);
                Term::throw(a, p)
            }
        }
    }

    /// `\h:σ. \t:[σ]. \r:ρ. body` for the step argument of `lrec`.
    fn step_fn(&mut self, gamma: &mut Ctx, delta: &mut Ctx, elem: &Type, rho: &Type, budget: usize) -> Term {
        let names = [self.fresh_var(), self.fresh_var(), self.fresh_var()];
        let tys = [elem.clone(), Type::list(elem.clone()), rho.clone()];
        for (x, t) in names.iter().zip(&tys) {
            gamma.push((x.clone(), t.clone()));
        }
        let body = self.term(gamma, delta, rho, budget - 3);
        gamma.truncate(gamma.len() - 3);
        names.into_iter().zip(tys).rev().fold(body, |b, (x, t)| Term::lam_ann(x, t, b))
    }
}

struct Untyped<'r> {
    rng: &'r mut ChaCha8Rng,
}

const VARS: [&str; 3] = ["x", "y", "z"];
const CONTS: [&str; 2] = ["a", "b"];

impl Untyped<'_> {
    fn var(&mut self) -> String {
        VARS.choose(self.rng).expect("nonempty").to_string()
    }

    fn cont(&mut self) -> String {
        CONTS.choose(self.rng).expect("nonempty").to_string()
    }

    fn atom(&mut self) -> Term {
        match self.rng.gen_range(0..8) {
            0..=3 => Term::var(self.var()),
            4 => Term::Unit,
            5 => Term::Nil,
            6 => Term::Cons,
            _ => Term::Lrec,
        }
    }

    /// A value of size at most `budget`.
    fn value(&mut self, budget: usize) -> Term {
        let choice = if budget < 2 { 0 } else { self.rng.gen_range(0..6) };
        match choice {
            1 => Term::lam(self.var(), self.term(budget - 1)),
            2 if budget >= 3 => {
                let parts = split(self.rng, budget - 2, &[1]);
                let head = if self.rng.gen_bool(0.5) { Term::Cons } else { Term::Lrec };
                Term::app(head, self.value(parts[0]))
            }
            3 if budget >= 5 => {
                let parts = split(self.rng, budget - 3, &[1, 1]);
                let head = if self.rng.gen_bool(0.5) { Term::Cons } else { Term::Lrec };
                Term::apps(head, [self.value(parts[0]), self.value(parts[1])])
            }
            _ => self.atom(),
        }
    }

    fn term(&mut self, budget: usize) -> Term {
        if budget <= 1 {
            return self.atom();
        }
        let mut weights = [3u32, 2, 3, 3, 3, 0, 0, 0, 0, 0, 0, 0];
        if budget >= 4 {
            weights[5] = 3; // beta redex
            weights[8] = 1; // v (throw a t)
            weights[9] = 1; // (throw a t) s
        }
        if budget >= 3 {
            weights[6] = 2; // catch a. throw a t
            weights[7] = 2; // catch a. throw b v
            weights[10] = 1; // throw b (throw a t)
        }
        if budget >= 7 {
            weights[11] = 2; // lrec v v [] / lrec v v (cons v v)
        }
        let dist = WeightedIndex::new(weights).expect("positive weights");
        match dist.sample(self.rng) {
            0 => self.value(budget),
            1 => Term::lam(self.var(), self.term(budget - 1)),
            2 => {
                if budget < 3 {
                    return self.atom();
                }
                let parts = split(self.rng, budget - 1, &[1, 1]);
                Term::app(self.term(parts[0]), self.term(parts[1]))
            }
            3 => Term::catch(self.cont(), self.term(budget - 1)),
            4 => Term::throw(self.cont(), self.term(budget - 1)),
            5 => {
                let parts = split(self.rng, budget - 2, &[1, 1]);
                Term::app(Term::lam(self.var(), self.term(parts[0])), self.value(parts[1]))
            }
            6 => {
                let a = self.cont();
                Term::catch(a.clone(), Term::throw(a, self.term(budget - 2)))
            }
            7 => {
                let inner = Term::throw(self.cont(), self.value(budget - 2));
                Term::catch(self.cont(), inner)
            }
            8 => {
                let parts = split(self.rng, budget - 2, &[1, 1]);
                let thrown = Term::throw(self.cont(), self.term(parts[1]));
                Term::app(self.value(parts[0]), thrown)
            }
            9 => {
                let parts = split(self.rng, budget - 2, &[1, 1]);
                let thrown = Term::throw(self.cont(), self.term(parts[0]));
                Term::app(thrown, self.term(parts[1]))
            }
            10 => {
                let inner = Term::throw(self.cont(), self.term(budget - 2));
                Term::throw(self.cont(), inner)
            }
            _ => {
                if budget >= 11 && self.rng.gen_bool(0.5) {
                    let parts = split(self.rng, budget - 7, &[1, 1, 1, 1]);
                    let l = Term::cons(self.value(parts[2]), self.value(parts[3]));
                    Term::lrec(self.value(parts[0]), self.value(parts[1]), l)
                } else {
                    let parts = split(self.rng, budget - 5, &[1, 1]);
                    Term::lrec(self.value(parts[0]), self.value(parts[1]), Term::Nil)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq, size};

    #[test]
    fn deterministic() {
        for typed in [true, false] {
            let cfg = GenConfig { seed: 42, typed, ..GenConfig::default() };
            assert!(alpha_eq(&gen_term(&cfg), &gen_term(&cfg)));
        }
    }

    #[test]
    fn typed_terms_check_against_target() {
        let cfg = GenConfig { target_type: Some(Type::Unit), ..GenConfig::default() };
        for seed in 0..300 {
            let t = gen_term(&cfg.with_seed(seed));
            assert_eq!(infer(&TypingEnv::new(), &t).unwrap(), Type::Unit, "{t}");
        }
    }

    #[test]
    fn sizes_are_bounded() {
        for typed in [true, false] {
            for max_size in [6, 12, 30] {
                let cfg = GenConfig { max_size, typed, ..GenConfig::default() };
                for seed in 0..500 {
                    let t = gen_term(&cfg.with_seed(seed));
                    assert!(size(&t) <= max_size, "{t}");
                }
            }
        }
        for max_size in 1..6 {
            let cfg = GenConfig { max_size, target_type: Some(Type::Unit), ..GenConfig::default() };
            for seed in 0..200 {
                assert!(size(&gen_term(&cfg.with_seed(seed))) <= max_size);
            }
        }
    }

    #[test]
    fn tiny_budgets() {
        let cfg = GenConfig { max_size: 1, typed: false, ..GenConfig::default() };
        assert_eq!(size(&gen_term(&cfg)), 1);
        let cfg = GenConfig { max_size: 1, target_type: Some(Type::arrow(Type::Unit, Type::Unit)), ..GenConfig::default() };
        // no inhabitant of an arrow type has size 1; the fallback is the smallest one
        assert_eq!(size(&gen_term(&cfg)), 2);
        let cfg = GenConfig { max_size: 1, target_type: Some(Type::list(Type::nat())), ..GenConfig::default() };
        assert_eq!(infer(&TypingEnv::new(), &gen_term(&cfg)).unwrap(), Type::list(Type::nat()));
    }

    #[test]
    fn typed_terms_have_principal_types() {
        for seed in 0..2000 {
            let t = gen_term(&GenConfig::default().with_seed(seed));
            infer(&TypingEnv::new(), &t).unwrap_or_else(|e| panic!("seed {seed}: {t}: {e}"));
        }
    }

    #[test]
    fn split_respects_minimums() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for total in 3..20 {
            let parts = split(&mut rng, total, &[1, 2]);
            assert_eq!(parts.iter().sum::<usize>(), total);
            assert!(parts[0] >= 1 && parts[1] >= 2);
        }
    }
}
