use distlaw_core::sampler::{edge_probability, interval_embedding_probability, sample, EdgeProfile, Seed};
use distlaw_core::Structure;

fn profiles() -> Vec<EdgeProfile> {
    vec![
        EdgeProfile::CaseA { alpha: 0.5 },
        EdgeProfile::CaseB { alpha: 0.25 },
        EdgeProfile::SecondContext { alpha: 0.7 },
        EdgeProfile::Custom { probs: vec![0.9, 0.1, 0.0, 1.0] },
        EdgeProfile::Sparsified { probs: vec![0.5, 1.0], indices: vec![2, 5] },
    ]
}

#[test]
fn samples_are_deterministic_in_profile_size_and_seed() {
    for p in profiles() {
        for n in [1, 2, 17, 90] {
            let a = sample(&p, n, Seed::new(5).trial(3)).unwrap();
            let b = sample(&p, n, Seed::new(5).trial(3)).unwrap();
            assert_eq!(a, b);
            a.check_invariants().unwrap();
        }
        let a = sample(&p, 90, Seed::new(5)).unwrap();
        let c = sample(&p, 90, Seed::new(6)).unwrap();
        if p.alpha().is_some() {
            assert_ne!(a, c);
        }
    }
}

#[test]
fn probabilities_are_in_range() {
    for p in profiles() {
        for n in [2, 3, 10, 200] {
            for i in 1..=n.min(12) as u32 {
                for j in 1..=n.min(12) as u32 {
                    if i != j {
                        let q = edge_probability(&p, n, i, j).unwrap();
                        assert!((0.0..=1.0).contains(&q), "{p:?} {n} {i} {j}: {q}");
                    }
                }
            }
        }
    }
}

#[test]
fn aligned_triangle_frequency_matches_the_product() {
    // Vertices at positions 1, 2, 3 under case A: all three distances have
    // probability 2^-α.
    let p = EdgeProfile::CaseA { alpha: 0.5 };
    let exact = interval_embedding_probability(&Structure::complete_graph(3), &p).unwrap();
    assert!((exact - 2f64.powf(-1.5)).abs() < 1e-12);
    let trials = 10_000;
    let hits = (0..trials)
        .filter(|&t| {
            let m = sample(&p, 3, Seed::new(77).trial(t)).unwrap();
            m.edge_count() == 3
        })
        .count() as f64;
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((hits / trials as f64 - exact).abs() < 4.0 * sigma);
}

#[test]
fn sparsified_profile_only_uses_listed_distances() {
    let p = EdgeProfile::Sparsified { probs: vec![1.0, 1.0], indices: vec![2, 5] };
    let m = sample(&p, 30, Seed::new(1)).unwrap();
    for (u, v) in m.edges() {
        assert!([2, 5].contains(&(v - u)));
    }
    assert_eq!(m.edge_count(), 28 + 25);
}
