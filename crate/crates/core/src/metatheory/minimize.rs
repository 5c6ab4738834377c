use crate::syntax::{size, Term};

/// Replacement candidates for a subterm, smallest first.
fn shrinks(t: &Term) -> Vec<Term> {
    let mut out = vec![Term::Unit, Term::Nil];
    out.extend(t.children().into_iter().cloned());
    match t {
        Term::Lam(x, ann, b) if size(b) > 1 => {
            out.push(Term::Lam(x.clone(), ann.clone(), Box::new(Term::Unit)));
            out.push(Term::Lam(x.clone(), ann.clone(), Box::new(Term::var(x.as_str()))));
        }
        Term::Catch(a, b) if size(b) > 1 => out.push(Term::catch(a.as_str(), Term::Unit)),
        Term::Throw(a, b) if size(b) > 1 => out.push(Term::throw(a.as_str(), Term::Unit)),
        _ => {}
    }
    out.sort_by_key(size);
    out
}

fn paths(t: &Term, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for (i, c) in t.children().into_iter().enumerate() {
        prefix.push(i);
        paths(c, prefix, out);
        prefix.pop();
    }
}

/// Greedily shrinks `t` while `failing` keeps holding: repeatedly replaces
/// some subterm by a strictly smaller one (an atom, one of its children, or
/// the same binder around an atom). The result is locally minimal.
///
/// `failing(t)` must hold on entry; it holds for the result.
pub fn minimize(t: &Term, mut failing: impl FnMut(&Term) -> bool) -> Term {
    let mut cur = t.clone();
    'outer: loop {
        let mut ps = Vec::new();
        paths(&cur, &mut Vec::new(), &mut ps);
        let cur_size = size(&cur);
        for p in ps {
            let sub = cur.subterm(&p).expect("path comes from the term");
            for cand in shrinks(sub) {
                let next = cur.replace_at(&p, cand);
                if size(&next) < cur_size && failing(&next) {
                    cur = next;
                    continue 'outer;
                }
            }
        }
        return cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metatheory::gen::{gen_term, GenConfig};
    use crate::surface::parse_term;

    fn has_catch(t: &Term) -> bool {
        matches!(t, Term::Catch(..)) || t.children().into_iter().any(has_catch)
    }

    #[test]
    fn always_failing_shrinks_to_unit() {
        let t = parse_term("(\\x. catch a. throw a x) [(), ()]").unwrap();
        assert_eq!(minimize(&t, |_| true), Term::Unit);
    }

    #[test]
    fn keeps_the_failure() {
        let cfg = GenConfig { max_size: 40, typed: false, ..GenConfig::default() };
        let mut tried = 0;
        for seed in 0..200 {
            let t = gen_term(&cfg.with_seed(seed));
            if !has_catch(&t) || size(&t) < 10 {
                continue;
            }
            tried += 1;
            let m = minimize(&t, has_catch);
            assert!(has_catch(&m));
            assert_eq!(size(&m), 2, "{m}");
            assert!(matches!(&m, Term::Catch(_, b) if size(b) == 1));
        }
        assert!(tried > 10);
    }
}
