#![allow(dead_code)]

use distlaw_core::logic::Formula;
use distlaw_core::{Structure, Vertex};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Structure {
    let mut edges = Vec::new();
    for i in 1..=n as Vertex {
        for j in i + 1..=n as Vertex {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Structure::graph(n, &edges).unwrap()
}

/// Graph on `n` vertices from the bits of `mask` (pairs in lexicographic
/// order).
pub fn graph_from_mask(n: usize, mask: u32) -> Structure {
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 1..=n as Vertex {
        for j in i + 1..=n as Vertex {
            if mask >> bit & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    Structure::graph(n, &edges).unwrap()
}

pub fn all_graphs(n: usize) -> Vec<Structure> {
    let pairs = n * n.saturating_sub(1) / 2;
    (0u32..1 << pairs).map(|m| graph_from_mask(n, m)).collect()
}

/// Random graph formula of quantifier depth at most `depth` whose free
/// variables are drawn from `vars`.
pub fn random_formula(rng: &mut impl Rng, vars: &mut Vec<String>, depth: usize, size: usize) -> Formula {
    let pick = |rng: &mut ChaCha8Rng, vars: &Vec<String>| vars.choose(rng).unwrap().clone();
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let leaf = |r: &mut ChaCha8Rng, vars: &Vec<String>| -> Formula {
        if vars.is_empty() {
            return if r.gen_bool(0.5) { Formula::True } else { Formula::False };
        }
        match r.gen_range(0..5) {
            0 => Formula::eq(&pick(r, vars), &pick(r, vars)),
            1 if r.gen_bool(0.2) => Formula::True,
            _ => Formula::atom("E", &[&pick(r, vars), &pick(r, vars)]),
        }
    };
    if size == 0 {
        return leaf(&mut r, vars);
    }
    let choice = r.gen_range(0..if depth > 0 { 7 } else { 5 });
    match choice {
        0 => leaf(&mut r, vars),
        1 => Formula::not(random_formula(&mut r, vars, depth, size - 1)),
        2 => Formula::and(
            random_formula(&mut r, vars, depth, size / 2),
            random_formula(&mut r, vars, depth, size / 2),
        ),
        3 => Formula::or(
            random_formula(&mut r, vars, depth, size / 2),
            random_formula(&mut r, vars, depth, size / 2),
        ),
        4 => Formula::implies(
            random_formula(&mut r, vars, depth, size / 2),
            random_formula(&mut r, vars, depth, size / 2),
        ),
        _ => {
            let v = ["x", "y", "z", "w"][r.gen_range(0..4)].to_string();
            vars.push(v.clone());
            let body = random_formula(&mut r, vars, depth - 1, size - 1);
            vars.pop();
            if choice == 5 {
                Formula::exists(&v, body)
            } else {
                Formula::forall(&v, body)
            }
        }
    }
}

/// Random sentence of quantifier depth between 1 and `depth`.
pub fn random_sentence(rng: &mut impl Rng, depth: usize, size: usize) -> Formula {
    let v = "x".to_string();
    let body = random_formula(rng, &mut vec![v.clone()], depth - 1, size);
    if rng.gen_bool(0.5) {
        Formula::exists(&v, body)
    } else {
        Formula::forall(&v, body)
    }
}

/// Catalog over the graph vocabulary declaring between `lo` and `hi`
/// random algebraic pairs with `|B| ≤ 3` and `|A| < |B|`.
pub fn random_catalog(rng: &mut impl Rng, lo: usize, hi: usize, k_max: usize) -> distlaw_core::closure::ClosureCatalog {
    use distlaw_core::closure::{ClosureCatalog, Flag};
    use distlaw_core::structures::Vocabulary;
    let mut cat = ClosureCatalog::new(Vocabulary::graph(), k_max, "random").unwrap();
    for _ in 0..rng.gen_range(lo..=hi) {
        let size = rng.gen_range(2..=3);
        let b = random_graph(rng, size, 0.6);
        let a_len = rng.gen_range(0..size);
        let a: distlaw_core::VertexSet = (1..=a_len as Vertex).collect();
        cat.insert_pair(&b, &a, Flag::Algebraic).unwrap();
    }
    cat
}
