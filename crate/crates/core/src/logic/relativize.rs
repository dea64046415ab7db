use super::formula::fresh_var;
use super::Formula;
use crate::error::{Error, Result};

/// Restrict every quantifier of `phi` to the set defined by `guard`, a
/// formula with exactly one free variable: `∃x ψ` becomes
/// `∃x (θ(x) & ψ)` and `∀x ψ` becomes `∀x (θ(x) -> ψ)`.
pub fn relativize(phi: &Formula, guard: &Formula) -> Result<Formula> {
    let free = guard.free_vars();
    if free.len() != 1 {
        return Err(Error::invalid(format!(
            "guard must have exactly one free variable, found {}",
            free.len()
        )));
    }
    let g = free.into_iter().next().unwrap();
    Ok(rel(phi, guard, &g))
}

fn rel(phi: &Formula, guard: &Formula, g: &str) -> Formula {
    match phi {
        Formula::True | Formula::False | Formula::Atom { .. } | Formula::Eq(..) => phi.clone(),
        Formula::Not(f) => Formula::not(rel(f, guard, g)),
        Formula::And(a, b) => Formula::and(rel(a, guard, g), rel(b, guard, g)),
        Formula::Or(a, b) => Formula::or(rel(a, guard, g), rel(b, guard, g)),
        Formula::Implies(a, b) => Formula::implies(rel(a, guard, g), rel(b, guard, g)),
        Formula::Exists(v, f) => Formula::exists(v, Formula::and(instance(guard, g, v), rel(f, guard, g))),
        Formula::Forall(v, f) => {
            Formula::forall(v, Formula::implies(instance(guard, g, v), rel(f, guard, g)))
        }
    }
}

// θ(v): the guard with its free variable renamed to `v`. Bound variables of
// the guard are renamed apart first so they cannot clash with `v`.
fn instance(guard: &Formula, g: &str, v: &str) -> Formula {
    if g == v {
        return guard.clone();
    }
    let mut taken = guard.all_vars();
    taken.insert(v.to_string());
    let fresh = fresh_var(&mut taken);
    guard.substitute(g, &fresh).substitute(&fresh, v)
}

#[cfg(test)]
mod tests {
    use super::super::{holds_sentence, parse_graph_formula};
    use super::*;
    use crate::structures::{vset, Structure};

    fn p(s: &str) -> Formula {
        parse_graph_formula(s).unwrap()
    }

    #[test]
    fn trivial_guard() {
        let phi = p("forall x. exists y. E(x,y)");
        let r = relativize(&phi, &p("x=x")).unwrap();
        for m in [Structure::path_graph(3), Structure::graph(3, &[(1, 2)]).unwrap()] {
            assert_eq!(holds_sentence(&m, &phi).unwrap(), holds_sentence(&m, &r).unwrap());
        }
    }

    #[test]
    fn guard_selects_first_two_positions() {
        // P3 with successor; the guard holds at positions 1 and 2.
        let m = Structure::graph_with_successor(3, &[(1, 2), (2, 3)]).unwrap();
        let guard = p("(!exists z. S(z,x) | exists z. (S(z,x) & !exists w. S(w,z)))");
        let phi = p("exists x. exists y. E(x,y)");
        let r = relativize(&phi, &guard).unwrap();
        assert!(holds_sentence(&m, &r).unwrap());
        let sub = m.restrict(&vset([1, 2])).unwrap().structure;
        assert!(holds_sentence(&sub, &phi).unwrap());
        // Dropping edge 1-2 leaves nothing inside the guarded set.
        let m2 = Structure::graph_with_successor(3, &[(2, 3)]).unwrap();
        assert!(!holds_sentence(&m2, &r).unwrap());
    }

    #[test]
    fn guard_variable_clash() {
        // Guard binds x internally; relativizing "exists x. ..." must not capture.
        let guard = p("exists x. E(y,x)");
        let r = relativize(&p("exists x. x=x"), &guard).unwrap();
        let m = Structure::graph(3, &[(1, 2)]).unwrap();
        assert!(holds_sentence(&m, &r).unwrap());
        let isolated = Structure::graph(2, &[]).unwrap();
        assert!(!holds_sentence(&isolated, &r).unwrap());
    }

    #[test]
    fn empty_guard() {
        let r = relativize(&p("exists x. x=x"), &p("!x=x")).unwrap();
        assert!(!holds_sentence(&Structure::path_graph(3), &r).unwrap());
        assert!(relativize(&p("exists x. x=x"), &p("E(x,y)")).is_err());
    }
}
