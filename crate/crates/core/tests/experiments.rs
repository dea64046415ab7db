use distlaw_core::closure::{ClosureCatalog, ClosureParams, Flag};
use distlaw_core::experiments::{
    classify_pair, closure_size_scan, convergence_diagnostics, empty_closure_scan, prob_series,
    simply_good_check, weakly_nice_scan, GoodConfig, GrowthFunction, Pair, PairVerdict, ScanConfig,
    Thresholds, Verdict,
};
use distlaw_core::logic::parse_graph_formula;
use distlaw_core::sampler::{expected_extensions, EdgeProfile};
use distlaw_core::structures::{canonical_form, vset, Vocabulary};
use distlaw_core::{Structure, VertexSet};

#[test]
fn series_are_reproducible() {
    let phi = parse_graph_formula("exists x. exists y. exists z. (E(x,y) & E(y,z) & E(x,z))").unwrap();
    let p = EdgeProfile::CaseA { alpha: 0.6 };
    let a = prob_series(&phi, &p, &[4, 8, 16, 32], 50, 3).unwrap();
    let b = prob_series(&phi, &p, &[4, 8, 16, 32], 50, 3).unwrap();
    assert_eq!(a, b);
    for e in &a.entries {
        assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
    }
    let v = convergence_diagnostics(&a, GrowthFunction::Power, Thresholds::default()).unwrap();
    assert_eq!(v, convergence_diagnostics(&b, GrowthFunction::Power, Thresholds::default()).unwrap());
}

#[test]
fn tautology_series_is_flat_at_one() {
    let phi = parse_graph_formula("forall x. x=x").unwrap();
    let s = prob_series(&phi, &EdgeProfile::CaseA { alpha: 0.5 }, &[2, 4, 8, 16, 32], 20, 0).unwrap();
    assert!(s.entries.iter().all(|e| e.p_hat == 1.0));
    let v = convergence_diagnostics(&s, GrowthFunction::Power, Thresholds::default()).unwrap();
    assert_eq!(v.verdict, Verdict::ZeroOneLike);
}

#[test]
fn growth_function_halving_is_transitive() {
    let grid: Vec<usize> = (1..=20).map(|i| 1 << i).collect();
    for eps1 in [0.05, 0.1, 0.3, 0.7, 1.0] {
        assert!(GrowthFunction::Power.transitive(eps1, eps1 / 2.0, &grid));
        assert!(!GrowthFunction::Power.transitive(eps1, eps1 * 0.6, &grid[1..]));
    }
}

#[test]
fn disjoint_edge_families_grow() {
    // Greedy disjoint edges over the empty base: about half the vertices
    // of a graph with many edges.
    let pair = Pair::new(Structure::complete_graph(2), VertexSet::new()).unwrap();
    let cfg = ScanConfig::new(vec![64, 128, 256, 512], 3, 4);
    let r = weakly_nice_scan(&pair, &EdgeProfile::CaseA { alpha: 0.5 }, &cfg).unwrap();
    assert!(r.fit.slope > 0.8, "{r:?}");
}

#[test]
fn bounded_common_neighbours_give_bounded_families() {
    let pair = Pair::new(Structure::complete_graph(3), vset([1, 2])).unwrap();
    let p = EdgeProfile::CaseA { alpha: 0.8 };
    // Summation oracle: the expected number of common neighbours of a
    // middle edge stays small.
    for n in [256usize, 1024, 4096] {
        let mid = (n / 2) as u32;
        assert!(expected_extensions(&p, n, &[mid, mid + 1], &pair.b).unwrap() < 4.0);
    }
    let cfg = ScanConfig::new(vec![256, 512, 1024], 6, 5);
    let r = weakly_nice_scan(&pair, &p, &cfg).unwrap();
    assert!(r.rows.iter().all(|row| row.median_max <= 12.0), "{r:?}");
    let c = classify_pair(&pair, &p, &cfg, GrowthFunction::Power, 0.15, 0.3).unwrap();
    assert_eq!(c.verdict, PairVerdict::ILike);
}

#[test]
fn closure_scans() {
    let p = EdgeProfile::CaseA { alpha: 0.8 };
    let cat = ClosureCatalog::common_neighbor(9).unwrap();
    let grid = [64, 256, 1024];
    let rows = closure_size_scan(&p, &cat, ClosureParams::new(3, 1).unwrap(), 2, 0.5, &grid, 20, 8).unwrap();
    assert!(rows.last().unwrap().violation_fraction <= rows[0].violation_fraction);
    assert!(rows.iter().all(|r| r.max_size >= 2));
    // Iterating k twice never exceeds one pass at k². Wide closures are
    // expensive, so this runs on small n.
    let cat = cat.normalized();
    let small = [16, 24];
    let km = closure_size_scan(&p, &cat, ClosureParams::new(3, 2).unwrap(), 2, 0.5, &small, 5, 9).unwrap();
    let wide = closure_size_scan(&p, &cat, ClosureParams::new(9, 1).unwrap(), 2, 0.5, &small, 5, 9).unwrap();
    for (a, b) in km.iter().zip(&wide) {
        assert!(a.max_size <= b.max_size, "{a:?} {b:?}");
    }
}

#[test]
fn empty_closure_types() {
    // No empty-anchored types: the closure of the empty set is empty.
    let p = EdgeProfile::CaseA { alpha: 0.5 };
    let cat = ClosureCatalog::common_neighbor(3).unwrap();
    let rows = empty_closure_scan(&p, &cat, ClosureParams::new(3, 2).unwrap(), &[16, 32], 10, 1).unwrap();
    let empty = canonical_form(&Structure::graph(0, &[]).unwrap(), &[]).unwrap().code();
    for r in &rows {
        assert_eq!(r.masses.len(), 1);
        assert_eq!(r.masses[&empty], 1.0);
    }
    // With the successor: consecutive triangles are declared algebraic over
    // nothing, and show up in the empty closure.
    let vocab = Vocabulary::graph_with_successor();
    let mut cat = ClosureCatalog::new(vocab, 3, "test").unwrap();
    let tri = Structure::graph_with_successor(3, &[(1, 2), (2, 3), (1, 3)]).unwrap();
    cat.insert_pair(&tri, &VertexSet::new(), Flag::Algebraic).unwrap();
    let p = EdgeProfile::CaseB { alpha: 0.9 };
    let rows = empty_closure_scan(&p, &cat, ClosureParams::new(3, 1).unwrap(), &[6, 8], 40, 2).unwrap();
    for r in &rows {
        assert!((r.masses.values().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(r.masses.keys().any(|k| *k != empty), "{r:?}");
    }
}

#[test]
fn simply_good_examples() {
    let cat = ClosureCatalog::empty(Vocabulary::graph(), 3).unwrap();
    // N = B: the placement itself is the extension.
    let edge = Structure::graph(2, &[(1, 2)]).unwrap();
    let cfg = GoodConfig::new(edge, vset([1, 2]), vset([1]), vset([1, 2])).unwrap();
    let r = simply_good_check(&cfg, 3, &cat, &EdgeProfile::CaseA { alpha: 0.5 }, 64, 20, 1).unwrap();
    assert_eq!((r.placed, r.passed), (20, 20));

    // A pendant vertex: plenty of candidates at n = 256.
    let pendant = Structure::graph(2, &[(1, 2)]).unwrap();
    let cfg = GoodConfig::new(pendant.clone(), vset([1]), vset([1]), vset([1, 2])).unwrap();
    let r = simply_good_check(&cfg, 3, &cat, &EdgeProfile::CaseA { alpha: 0.5 }, 256, 20, 2).unwrap();
    assert_eq!(r.pass_fraction, 1.0);

    // Edges only at distance 5 with probability 1e-9: no neighbour exists.
    let p = EdgeProfile::Sparsified { probs: vec![1e-9], indices: vec![5] };
    let r = simply_good_check(&cfg, 3, &cat, &p, 256, 20, 3).unwrap();
    assert_eq!(r.placed, 20);
    assert_eq!(r.pass_fraction, 0.0);
    assert_eq!(r.witnesses.len(), 1);
}
