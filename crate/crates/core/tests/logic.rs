mod common;

use common::{random_formula, random_graph, random_sentence, rng};
use distlaw_core::logic::{
    equiv_d, evaluate, evaluate_naive, holds_sentence, parse_graph_formula, parse_lines, relativize,
    Assignment, Formula,
};
use distlaw_core::structures::Vocabulary;
use distlaw_core::{Error, Structure, Vertex, VertexSet};
use proptest::prelude::*;
use rand::Rng;

fn var() -> impl Strategy<Value = String> {
    prop_oneof![Just("x"), Just("y"), Just("z"), Just("v1"), Just("w0")].prop_map(String::from)
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        (var(), var()).prop_map(|(a, b)| Formula::eq(&a, &b)),
        (var(), var()).prop_map(|(a, b)| Formula::atom("E", &[&a, &b])),
    ];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (var(), inner.clone()).prop_map(|(v, f)| Formula::exists(&v, f)),
            (var(), inner).prop_map(|(v, f)| Formula::forall(&v, f)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn print_then_parse_is_identity(phi in formula()) {
        let text = phi.to_string();
        prop_assert_eq!(parse_graph_formula(&text).unwrap(), phi);
    }
}

fn random_assignment(r: &mut impl Rng, phi: &Formula, n: usize) -> Assignment {
    phi.free_vars()
        .into_iter()
        .map(|v| (v, r.gen_range(1..=n as Vertex)))
        .collect()
}

#[test]
fn memoized_and_naive_evaluators_agree() {
    let mut r = rng(31);
    let mut trues = 0;
    for _ in 0..1000 {
        let n = r.gen_range(1..=8);
        let p = r.gen_range(0.1..0.9);
        let m = random_graph(&mut r, n, p);
        let depth = r.gen_range(0..=3);
        let mut vars = vec!["x".to_string(), "y".to_string()];
        let phi = random_formula(&mut r, &mut vars, depth, 10);
        let asg = random_assignment(&mut r, &phi, n);
        let a = evaluate(&m, &phi, &asg).unwrap();
        assert_eq!(a, evaluate_naive(&m, &phi, &asg).unwrap(), "{phi} on {m:?}");
        trues += a as usize;
    }
    // Both truth values occur often.
    assert!(trues > 200 && trues < 800, "{trues}");
}

#[test]
fn equivalent_structures_agree_on_random_depth_three_sentences() {
    let mut r = rng(32);
    let mut pairs = Vec::new();
    while pairs.len() < 20 {
        let n1 = r.gen_range(2..=5);
        let n2 = r.gen_range(2..=5);
        let a = random_graph(&mut r, n1, 0.5);
        let b = random_graph(&mut r, n2, 0.5);
        if equiv_d(&a, &[], &b, &[], 3).unwrap() {
            pairs.push((a, b));
        }
    }
    for _ in 0..1000 {
        let (a, b) = &pairs[r.gen_range(0..pairs.len())];
        let phi = random_sentence(&mut r, 3, 10);
        assert!(phi.quantifier_depth() <= 3);
        assert_eq!(holds_sentence(a, &phi).unwrap(), holds_sentence(b, &phi).unwrap(), "{phi}");
    }
}

#[test]
fn relativization_matches_the_defined_substructure() {
    let mut r = rng(33);
    let mut checked = 0;
    while checked < 500 {
        let n = r.gen_range(1..=7);
        let m = random_graph(&mut r, n, 0.5);
        let guard = random_formula(&mut r, &mut vec!["u".to_string()], 1, 4);
        if guard.free_vars().len() != 1 {
            continue;
        }
        let g = guard.free_vars().into_iter().next().unwrap();
        let set: VertexSet = m
            .vertices()
            .filter(|&v| evaluate(&m, &guard, &[(g.clone(), v)].into_iter().collect()).unwrap())
            .collect();
        if set.is_empty() {
            continue;
        }
        let phi = random_sentence(&mut r, 3, 8);
        let rel = relativize(&phi, &guard).unwrap();
        let sub = m.restrict(&set).unwrap().structure;
        assert_eq!(holds_sentence(&m, &rel).unwrap(), holds_sentence(&sub, &phi).unwrap(), "{phi} / {guard}");
        checked += 1;
    }
}

#[test]
fn parse_errors_carry_positions() {
    match parse_graph_formula("exists x. (E(x,y) & ") {
        Err(Error::Parse { line, column, .. }) => {
            assert_eq!(line, 1);
            assert!(column > 10);
        }
        other => panic!("{other:?}"),
    }
    let text = "exists x. x=x\n\n# comment\nforall y. E(y,\n";
    match parse_lines(text, &Vocabulary::graph()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    assert!(parse_lines("", &Vocabulary::graph()).unwrap().is_empty());
}

#[test]
fn small_named_examples() {
    let k3 = Structure::complete_graph(3);
    let k4 = Structure::complete_graph(4);
    let all_adjacent = parse_graph_formula("forall x. forall y. (!x=y -> E(x,y))").unwrap();
    assert!(holds_sentence(&k3, &all_adjacent).unwrap());
    assert!(!holds_sentence(&Structure::path_graph(3), &all_adjacent).unwrap());
    assert!(equiv_d(&k3, &[], &k4, &[], 3).unwrap());
    assert!(!equiv_d(&k3, &[], &k4, &[], 4).unwrap());
}
