mod common;

use common::{random_catalog, random_graph, rng};
use distlaw_core::closure::{
    check_axioms, check_containment, cl_k, cl_k_with, cl_km, closure_defining_formula, ClosureCatalog,
    ClosureParams, Strategy,
};
use distlaw_core::logic::{evaluate_naive, Assignment};
use distlaw_core::structures::vset;
use distlaw_core::{Structure, Vertex, VertexSet};
use rand::Rng;

fn random_subset(r: &mut impl Rng, m: &Structure, p: f64) -> VertexSet {
    m.vertices().filter(|_| r.gen_bool(p)).collect()
}

/// Union of all `B ⊆ M`, `|B| ≤ k`, algebraic over `B ∩ X`.
fn closure_by_subsets(m: &Structure, x: &VertexSet, k: usize, cat: &ClosureCatalog) -> VertexSet {
    let verts: Vec<Vertex> = m.vertices().collect();
    let mut out = x.clone();
    for mask in 1u32..1 << verts.len() {
        if mask.count_ones() as usize > k {
            continue;
        }
        let b: VertexSet = (0..verts.len()).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
        let r = m.restrict(&b).unwrap();
        let a = r.to_local(&b.intersection(x).copied().collect());
        if cat.is_algebraic(&r.structure, &a).unwrap() {
            out.extend(b);
        }
    }
    out
}

#[test]
fn derivation_sweep_and_subset_oracle_agree() {
    let mut r = rng(41);
    for i in 0..300 {
        let cat = random_catalog(&mut r, 0, 3, 3);
        let cat = if i % 2 == 0 { cat.normalized() } else { cat };
        let n = r.gen_range(1..=10);
        let m = random_graph(&mut r, n, 0.4);
        let x = random_subset(&mut r, &m, 0.3);
        let k = r.gen_range(1..=3);
        let d = cl_k_with(&m, &x, k, &cat, Strategy::Derivation).unwrap();
        let s = cl_k_with(&m, &x, k, &cat, Strategy::Sweep).unwrap();
        assert_eq!(d, s, "instance {i}");
        assert!(x.is_subset(&d) && d.iter().all(|&v| m.contains(v)));
        if cat.is_normalized() {
            assert_eq!(d, closure_by_subsets(&m, &x, k, &cat), "instance {i}");
        }
    }
}

#[test]
fn normalized_closures_are_monotone_and_restrict() {
    let mut r = rng(42);
    for _ in 0..200 {
        let cat = random_catalog(&mut r, 1, 3, 3).normalized();
        let n = r.gen_range(1..=6);
        let m = random_graph(&mut r, n, 0.5);
        let x = random_subset(&mut r, &m, 0.3);
        let extra = random_subset(&mut r, &m, 0.3);
        let y: VertexSet = x.union(&extra).copied().collect();
        let k = r.gen_range(1..=3);
        let cx = cl_k(&m, &x, k, &cat).unwrap();
        assert!(cx.is_subset(&cl_k(&m, &y, k, &cat).unwrap()));
        // Any N between cl(X) and M gives the same closure.
        let n_set: VertexSet = cx.union(&random_subset(&mut r, &m, 0.5)).copied().collect();
        let rn = m.restrict(&n_set).unwrap();
        let inner = rn.to_original(&cl_k(&rn.structure, &rn.to_local(&x), k, &cat).unwrap());
        assert_eq!(inner, cx);
        let report = check_axioms(&cat, &m, &x, &y, k, 3).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}

#[test]
fn iterated_closures_stay_inside_the_wide_closure() {
    let mut r = rng(43);
    for _ in 0..100 {
        let cat = random_catalog(&mut r, 1, 3, 9).normalized();
        let n = r.gen_range(2..=9);
        let m = random_graph(&mut r, n, 0.4);
        let x = random_subset(&mut r, &m, 0.3);
        let k = r.gen_range(1..=3);
        for rounds in 1..=2 {
            assert!(check_containment(&m, &x, k, rounds, &cat).unwrap());
        }
        // Composition: cl^{k,2} = cl^k(cl^k(X)).
        let once = cl_k(&m, &x, k, &cat).unwrap();
        let twice = cl_k(&m, &once, k, &cat).unwrap();
        assert_eq!(cl_km(&m, &x, ClosureParams::new(k, 2).unwrap(), &cat).unwrap(), twice);
    }
}

#[test]
fn defining_formula_matches_closure() {
    let mut r = rng(44);
    for i in 0..60 {
        let cat = random_catalog(&mut r, 1, 2, 3);
        let cat = if i % 2 == 0 { cat.normalized() } else { cat };
        let k = r.gen_range(1..=3);
        let l = r.gen_range(1..=2);
        let psi = closure_defining_formula(&cat, k, l).unwrap();
        let n = r.gen_range(l..=6);
        let m = random_graph(&mut r, n, 0.5);
        let params: Vec<Vertex> = (0..l).map(|_| r.gen_range(1..=n as Vertex)).collect();
        let cl = cl_k(&m, &params.iter().copied().collect(), k, &cat).unwrap();
        for y in m.vertices() {
            let mut asg = Assignment::new();
            asg.insert("y".into(), y);
            for (j, &p) in params.iter().enumerate() {
                asg.insert(format!("x{j}"), p);
            }
            assert_eq!(evaluate_naive(&m, &psi, &asg).unwrap(), cl.contains(&y), "instance {i}");
        }
    }
}

#[test]
fn common_neighbour_closure_on_a_path_of_triangles() {
    // Triangles 1-2-3, 2-3-4, 3-4-5: starting from an edge, the closure
    // walks the strip.
    let m = Structure::graph(5, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5)]).unwrap();
    let cat = ClosureCatalog::common_neighbor(3).unwrap();
    assert_eq!(cl_k(&m, &vset([1, 2]), 3, &cat).unwrap(), vset([1, 2, 3]));
    let p = ClosureParams::new(3, 3).unwrap();
    assert_eq!(cl_km(&m, &vset([1, 2]), p, &cat).unwrap(), vset([1, 2, 3, 4, 5]));
}
