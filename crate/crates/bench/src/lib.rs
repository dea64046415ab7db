//! Fixtures shared by the benchmarks.

use distlaw_core::closure::ClosureCatalog;
use distlaw_core::logic::{parse_graph_formula, Formula};
use distlaw_core::sampler::{sample, EdgeProfile, Seed};
use distlaw_core::Structure;

pub fn case_a(alpha: f64, n: usize, seed: u64) -> Structure {
    sample(&EdgeProfile::CaseA { alpha }, n, Seed::new(seed)).expect("valid profile")
}

pub fn common_neighbor(k_max: usize) -> ClosureCatalog {
    ClosureCatalog::common_neighbor(k_max).expect("valid catalog")
}

/// Depth-3 sentence: every edge lies in a triangle.
pub fn triangle_sentence() -> Formula {
    parse_graph_formula("forall x. forall y. (E(x,y) -> exists z. (E(x,z) & E(y,z)))").expect("parses")
}

/// Depth-3 extension axiom: every pair of distinct vertices has a common
/// non-neighbour outside it.
pub fn extension_sentence() -> Formula {
    parse_graph_formula("forall x. forall y. (!x=y -> exists z. (!z=x & !z=y & !E(x,z) & !E(y,z)))").expect("parses")
}
