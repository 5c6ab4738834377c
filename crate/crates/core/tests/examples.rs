use lambda_catch::confluence::{complete_development, is_parallel_step, join, parallel_reducts};
use lambda_catch::reduction::{contract, enumerate_redexes, evaluate, step_cbv, OutcomeKind, RuleTag};
use lambda_catch::stdlib::{decode_nat, encode_nat, library, lookup, prelude};
use lambda_catch::surface::{parse_term, parse_type, print};
use lambda_catch::syntax::{alpha_eq, free_vars, is_value, size, subst, Term, Type};
use lambda_catch::typing::{check, infer, TypeErrorKind, TypingEnv};

fn p(s: &str) -> Term {
    parse_term(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn ty(s: &str) -> Type {
    parse_type(s).unwrap()
}

fn with_prelude(s: &str) -> Term {
    prelude().expand(&p(s))
}

#[test]
fn syntax() {
    assert!(is_value(&p("\\x. x")));
    assert!(is_value(&p("cons () []")));
    assert!(!is_value(&p("throw a ()")));
    assert!(!is_value(&p("lrec v w []")));
    assert!(is_value(&p("lrec v w")));

    let fv = free_vars(&p("\\x. x y"));
    assert_eq!(fv.term_vars.into_iter().collect::<Vec<_>>(), ["y"]);
    assert!(free_vars(&p("catch a. throw a ()")).cont_vars.is_empty());
    let fv = free_vars(&p("throw a x"));
    assert!(fv.term_vars.contains("x") && fv.cont_vars.contains("a"));

    assert_eq!(subst(&p("x"), "x", &Term::Unit), Term::Unit);
    let out = subst(&p("\\y. x y"), "x", &p("y"));
    assert!(alpha_eq(&out, &p("\\z. y z")));
    assert!(!alpha_eq(&out, &p("\\y. y y")));
    assert_eq!(subst(&p("catch a. throw a x"), "x", &Term::Nil), p("catch a. throw a []"));

    assert!(alpha_eq(&p("\\x. x"), &p("\\y. y")));
    assert!(alpha_eq(&p("catch a. throw a ()"), &p("catch b. throw b ()")));
    assert!(!alpha_eq(&p("\\x. \\y. x"), &p("\\x. \\y. y")));
    assert!(!alpha_eq(&p("\\x:1. x"), &p("\\x. x")));

    assert_eq!(size(&Term::Unit), 1);
    assert_eq!(size(&p("(\\x. x) ()")), 4);
    assert_eq!(size(&p("throw a ()")), 2);
}

#[test]
fn typing() {
    let env = TypingEnv::new();
    assert!(Type::list(Type::nat()).is_arrow_free());
    assert!(!Type::list(ty("1 -> 1")).is_arrow_free());
    assert_eq!(infer(&env, &p("\\x:1. x")).unwrap(), ty("1 -> 1"));
    assert_eq!(infer(&env, &p("lrec () (\\h:1. \\t:[1]. \\r:1. r) []")).unwrap(), Type::Unit);
    let e = infer(&env, &p("catch a. \\x:1. x")).unwrap_err();
    assert_eq!(e.kind, TypeErrorKind::NonArrowFreeCatch(ty("1 -> 1")));
    let e = infer(&env, &p("catch a. throw a []")).unwrap_err();
    assert!(matches!(e.kind, TypeErrorKind::AmbiguousType(_)));
    assert_eq!(infer(&env, &lookup("pred").unwrap()).unwrap(), ty("[1] -> [1]"));

    check(&env, &Term::Nil, &Type::nat()).unwrap();
    let e = check(&env, &Term::Unit, &Type::nat()).unwrap_err();
    assert_eq!(e.kind, TypeErrorKind::Mismatch { expected: Type::nat(), found: Type::Unit });
    let env_a = TypingEnv::new().with_cont("a", Type::Unit).unwrap();
    check(&env_a, &p("throw a ()"), &Type::nat()).unwrap();
}

#[test]
fn contraction() {
    assert_eq!(contract(&p("(\\x. x) ()")), Some((RuleTag::BetaV, Term::Unit)));
    assert_eq!(contract(&p("lrec #1 s []")), Some((RuleTag::LrecNil, encode_nat(1))));
    assert_eq!(contract(&p("(throw a ()) []")), Some((RuleTag::ThrowProp, p("throw a ()"))));
    assert_eq!(contract(&p("catch a. throw b (\\x. throw a x)")), None);
}

#[test]
fn redex_enumeration() {
    assert!(enumerate_redexes(&p("\\x. x")).is_empty());
    let evs = enumerate_redexes(&p("cons (throw a r) t"));
    assert_eq!(evs.len(), 1);
    assert_eq!((evs[0].rule, evs[0].path.clone()), (RuleTag::ThrowProp, vec![0]));
    assert_eq!(evs[0].result, p("(throw a r) t"));
    let evs = enumerate_redexes(&p("catch a. throw a ((\\x. x) ())"));
    let rules: Vec<_> = evs.iter().map(|e| e.rule).collect();
    assert_eq!(rules, [RuleTag::Catch1, RuleTag::BetaV]);
}

#[test]
fn evaluation_order() {
    let ev = step_cbv(&p("(\\x. x) ((\\y. y) ())")).unwrap();
    assert_eq!((ev.rule, ev.path), (RuleTag::BetaV, vec![1]));
    let ev = step_cbv(&p("catch a. cons () []")).unwrap();
    assert_eq!((ev.rule, ev.result), (RuleTag::Catch3, p("[()]")));
    assert!(step_cbv(&p("\\x. (\\y. y) ()")).is_none());

    let out = evaluate(&p("throw b ()"), 10, false);
    assert_eq!(out.kind, OutcomeKind::UncaughtThrow { cont: "b".into(), payload: Term::Unit });
    let omega = p("(\\x. x x) (\\x. x x)");
    let out = evaluate(&omega, 50, false);
    assert!(matches!(out.kind, OutcomeKind::OutOfFuel(_)));
    assert_eq!(out.steps, 50);
}

#[test]
fn traces() {
    let out = evaluate(&with_prelude("pred #3"), 10_000, true);
    assert_eq!(decode_nat(out.value().unwrap()), Ok(2));
    let trace = out.trace.unwrap();
    assert_eq!(trace.len() as u64, out.steps);
    assert!(alpha_eq(&trace.last().unwrap().result, &encode_nat(2)));
    // traces stop growing at the cap but steps keep counting
    let out = evaluate(&p("(\\x. x x) (\\x. x x)"), 10_050, true);
    assert_eq!(out.trace.as_ref().unwrap().len(), 10_000);
    assert!(out.trace_truncated);
    assert_eq!(out.steps, 10_050);
}

#[test]
fn complete_developments() {
    assert_eq!(complete_development(&p("(\\x. x) ()")), Term::Unit);
    assert_eq!(complete_development(&p("catch a. throw a ()")), p("catch a. ()"));
    let m = complete_development(&p("throw a throw b ()"));
    assert_eq!(m, p("throw b ()"));
    assert!(is_parallel_step(&p("throw a throw b ()"), &m, 14).unwrap());
    assert_eq!(complete_development(&p("lrec #1 s []")), encode_nat(1));
}

#[test]
fn parallel_steps() {
    let rs = parallel_reducts(&p("(\\x. x) ()"), 14).unwrap();
    assert_eq!(rs.len(), 2);
    assert!(rs.iter().any(|t| alpha_eq(t, &p("(\\x. x) ()"))) && rs.contains(&Term::Unit));
    for t in ["()", "\\x. x", "catch a. throw a ((\\x. x) ())"] {
        assert!(is_parallel_step(&p(t), &p(t), 14).unwrap());
    }
    assert!(is_parallel_step(&p("(\\x. x) ()"), &Term::Unit, 14).unwrap());
    assert!(!is_parallel_step(&Term::Unit, &p("(\\x. x) ()"), 14).unwrap());
}

#[test]
fn joins() {
    let t = p("catch a. (\\x. x) ()");
    assert!(alpha_eq(&join(&t, &t, 4, 64).unwrap(), &t));
    assert_eq!(join(&Term::Unit, &p("(\\x. x) ()"), 4, 64), Some(Term::Unit));
    assert_eq!(join(&p("catch a. ()"), &p("catch a. throw a ()"), 4, 64), Some(Term::Unit));
    assert_eq!(join(&Term::Unit, &Term::Nil, 4, 64), None);
}

#[test]
fn numerals() {
    assert_eq!(encode_nat(0), Term::Nil);
    assert_eq!(encode_nat(2), p("cons () (cons () [])"));
    assert_eq!(decode_nat(&encode_nat(7)), Ok(7));
    assert!(decode_nat(&p("\\x. x")).is_err());
}

fn count(t: &Term) -> usize {
    t.as_list_literal().filter(|xs| xs.iter().all(|x| **x == Term::Unit)).map(|xs| xs.len()).expect("a numeral")
}

#[test]
fn library_programs() {
    let run = |src: &str| count(evaluate(&with_prelude(src), 100_000, false).value().expect("a value"));
    assert_eq!(run("plus #2 #3"), 2 + 3);
    assert_eq!(run("times #3 #4"), 3 * 4);
    assert_eq!(run("pred #1"), 0);
    assert_eq!(run("prodz [#4, #0, #9]"), 0);
    assert_eq!(run("prodz [#2, #3]"), 2 * 3);
    assert_eq!(run("prodz [#2, #3, #2]"), 2 * 3 * 2);
    for d in library() {
        check(&TypingEnv::new(), &d.term, &d.declared_type).unwrap();
    }
}

#[test]
fn nrec_conversions() {
    let nrec = lookup("nrec").unwrap();
    let vr = encode_nat(3);
    let vs = p("\\n:[1]. \\r:[1]. cons () (cons () r)");
    let zero = evaluate(&Term::apps(nrec.clone(), [vr.clone(), vs.clone(), encode_nat(0)]), 1000, false);
    assert!(alpha_eq(zero.value().unwrap(), &vr));
    for n in 0..4 {
        let lhs = Term::apps(nrec.clone(), [vr.clone(), vs.clone(), encode_nat(n + 1)]);
        let rec = Term::apps(nrec.clone(), [vr.clone(), vs.clone(), encode_nat(n)]);
        let rhs = Term::apps(vs.clone(), [encode_nat(n), rec]);
        let w = join(&lhs, &rhs, 40, 2000).unwrap_or_else(|| panic!("no join for n = {n}"));
        assert_eq!(count(&w), 3 + 2 * (n + 1), "{}", print(&w));
    }
}
