use lambda_catch::confluence::parallel_reducts;
use lambda_catch::metatheory::{
    check_case, explore_reduction_graph, gen_term, minimize, rule_coverage, run_property, CaseResult, GenConfig,
    GraphVerdict, Property, CONFLUENCE_BUDGET, GRAPH_CAP,
};
use lambda_catch::reduction::{enumerate_redexes, evaluate, OutcomeKind, RuleTag, DEFAULT_FUEL};
use lambda_catch::surface::parse_term;
use lambda_catch::syntax::{size, Term};
use lambda_catch::typing::{infer, TypingEnv};

#[test]
fn every_rule_is_exercised_by_typed_generation() {
    let counts = rule_coverage(10_000, &GenConfig::default(), 200);
    for (rule, n) in RuleTag::ALL.iter().zip(counts) {
        assert!(n > 0, "{rule} never fires: {counts:?}");
    }
}

#[test]
fn untyped_generation_exercises_every_rule() {
    let cfg = GenConfig { max_size: 12, typed: false, ..GenConfig::default() };
    let mut seen = [0usize; 7];
    for seed in 0..2000 {
        for ev in enumerate_redexes(&gen_term(&cfg.with_seed(seed))) {
            seen[RuleTag::ALL.iter().position(|r| *r == ev.rule).unwrap()] += 1;
        }
    }
    assert!(seen.iter().all(|&n| n > 0), "{seen:?}");
}

#[test]
fn confluence_inputs_are_not_trivial() {
    let cfg = GenConfig { max_size: 12, typed: false, ..GenConfig::default() };
    let mut multi = 0;
    let mut largest = 0;
    for seed in 0..2000 {
        let t = gen_term(&cfg.with_seed(seed));
        assert!(size(&t) <= 12);
        let n = parallel_reducts(&t, CONFLUENCE_BUDGET).unwrap().len();
        largest = largest.max(n);
        if enumerate_redexes(&t).len() >= 2 {
            multi += 1;
        }
    }
    assert!(multi > 300, "only {multi} terms with overlapping redexes");
    assert!(largest >= 8, "at most {largest} parallel reducts");
}

#[test]
fn graph_explorer_agrees_with_the_evaluator() {
    let cfg = GenConfig { max_size: 12, ..GenConfig::default() };
    for seed in 0..1000 {
        let t = gen_term(&cfg.with_seed(seed));
        let graph = explore_reduction_graph(&t, GRAPH_CAP);
        let out = evaluate(&t, DEFAULT_FUEL, false);
        match graph {
            GraphVerdict::Finite { longest, .. } => {
                assert!(!matches!(out.kind, OutcomeKind::OutOfFuel(_)));
                // the evaluation path is one of the reduction sequences
                assert!(out.steps as usize <= longest, "seed {seed}");
            }
            other => panic!("seed {seed}: {other:?}"),
        }
    }
}

#[test]
fn untyped_terms_can_diverge() {
    let omega = parse_term("(\\x. x x) (\\x. x x)").unwrap();
    assert!(matches!(explore_reduction_graph(&omega, GRAPH_CAP), GraphVerdict::Cycle(_)));
    assert!(matches!(evaluate(&omega, 1000, false).kind, OutcomeKind::OutOfFuel(_)));
    // which is why the SN property refuses it
    assert!(matches!(check_case(Property::StrongNormalization, &omega), CaseResult::Inconclusive(_)));
}

#[test]
fn all_properties_hold_on_a_small_run() {
    for p in Property::ALL {
        let cfg = GenConfig { seed: 99, max_size: if p.typed() { 20 } else { 10 }, ..GenConfig::default() };
        let r = run_property(p, 300, &cfg);
        assert!(r.failures.is_empty() && r.inconclusive.is_empty(), "{r}");
        assert_eq!(r.render_lines(), format!("PROP {} CASES 300 FAILURES 0\n", p.name()));
    }
}

#[test]
fn reports_are_deterministic() {
    let cfg = GenConfig { seed: 7, ..GenConfig::default() };
    let a = run_property(Property::SubjectReduction, 500, &cfg);
    let b = run_property(Property::SubjectReduction, 500, &cfg);
    assert_eq!(a, b);
    assert_eq!(run_property(Property::Progress, 0, &cfg).render_lines(), "PROP Progress CASES 0 FAILURES 0\n");
}

#[test]
fn broken_side_condition_is_caught() {
    // Without the FCV side condition, `catch a. \x. throw a x` would reduce to
    // a term with a dangling `a`; the reduction relation must not do that.
    let t = parse_term("catch a. \\x. throw a x").unwrap();
    assert!(enumerate_redexes(&t).is_empty());
    assert_eq!(check_case(Property::RedSubsetPred, &t), CaseResult::Pass);
}

#[test]
fn minimized_counterexamples_stay_typed() {
    // an artificial property: "no lrec anywhere", shrunk under a typing guard
    fn has_lrec(t: &Term) -> bool {
        matches!(t, Term::Lrec) || t.children().into_iter().any(has_lrec)
    }
    let cfg = GenConfig { max_size: 30, ..GenConfig::default() };
    let mut shrunk = 0;
    for seed in 0..300 {
        let t = gen_term(&cfg.with_seed(seed));
        if !has_lrec(&t) {
            continue;
        }
        let m = minimize(&t, |u| has_lrec(u) && infer(&TypingEnv::new(), u).is_ok());
        assert!(has_lrec(&m) && infer(&TypingEnv::new(), &m).is_ok());
        assert!(size(&m) <= size(&t));
        shrunk += 1;
    }
    assert!(shrunk > 20);
}
