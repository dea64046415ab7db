//! Extensions of a partial embedding `f0: A -> M` to embeddings of `B ⊇ A`.
//!
//! The search assigns the unmapped pattern vertices one at a time, always
//! picking the vertex with the fewest candidates. Candidates come from the
//! neighbour list of an already-mapped related vertex when there is one,
//! otherwise from the whole universe. Every assignment is checked against
//! all relations (edges and non-edges) to the vertices mapped so far.

use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{is_embedding, PartialEmbedding, Structure, Vertex};

/// Count saturation point.
pub const COUNT_CAP: u64 = i64::MAX as u64;

/// Extensions of `base` (a partial map from `pattern` into `target`) to
/// embeddings of the whole pattern. The domain of `base` plays the role of
/// `A`.
#[derive(Clone, Debug)]
pub struct ExtensionQuery<'a> {
    pub target: &'a Structure,
    pub pattern: &'a Structure,
    pub base: PartialEmbedding,
    pub limit: Option<u64>,
}

impl<'a> ExtensionQuery<'a> {
    pub fn new(target: &'a Structure, pattern: &'a Structure, base: PartialEmbedding) -> Self {
        ExtensionQuery {
            target,
            pattern,
            base,
            limit: None,
        }
    }

    pub fn with_limit(mut self, limit: u64) -> Self {
        self.limit = Some(limit);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.base.source_size() != self.pattern.n() {
            return Err(Error::invalid(format!(
                "base map is defined on {} vertices, pattern has {}",
                self.base.source_size(),
                self.pattern.n()
            )));
        }
        if self.pattern.vocab() != self.target.vocab() {
            return Err(Error::invalid("pattern and target use different vocabularies"));
        }
        if !is_embedding(&self.base, self.pattern, self.target) {
            return Err(Error::invalid("base map is not an embedding"));
        }
        Ok(())
    }
}

/// An extension count, possibly stopped at the query limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Count {
    pub value: u64,
    /// The search stopped at `limit`; the true count is at least `value`.
    pub capped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extensions {
    pub maps: Vec<PartialEmbedding>,
    pub truncated: bool,
}

pub fn count_extensions(q: &ExtensionQuery<'_>) -> Result<Count> {
    q.validate()?;
    let limit = q.limit.unwrap_or(COUNT_CAP).min(COUNT_CAP);
    let mut value = 0u64;
    let mut capped = false;
    if limit == 0 {
        return Ok(Count { value: 0, capped: true });
    }
    Search::new(q).run(&mut |_, _| {
        value += 1;
        if value >= limit {
            capped = true;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(Count { value, capped })
}

pub fn enumerate_extensions(q: &ExtensionQuery<'_>) -> Result<Extensions> {
    q.validate()?;
    let limit = q.limit.unwrap_or(COUNT_CAP);
    let mut maps = Vec::new();
    let mut truncated = false;
    if limit == 0 {
        return Ok(Extensions { maps, truncated: true });
    }
    Search::new(q).run(&mut |images, _| {
        if maps.len() as u64 >= limit {
            truncated = true;
            return ControlFlow::Break(());
        }
        maps.push(PartialEmbedding::from_images(images.to_vec()));
        ControlFlow::Continue(())
    });
    Ok(Extensions { maps, truncated })
}

/// Number of embeddings of `h` into `m`, stopped at `limit`.
pub fn count_embeddings(h: &Structure, m: &Structure, limit: Option<u64>) -> Result<Count> {
    let q = ExtensionQuery {
        target: m,
        pattern: h,
        base: PartialEmbedding::empty(h.n()),
        limit,
    };
    count_extensions(&q)
}

/// Visit every extension of `base` (assumed to be a valid partial
/// embedding) in search order. Unchecked; for callers that build bases
/// themselves.
pub(crate) fn visit_extensions<F>(target: &Structure, pattern: &Structure, base: &PartialEmbedding, mut visit: F)
where
    F: FnMut(&[Option<Vertex>]) -> ControlFlow<()>,
{
    let q = ExtensionQuery::new(target, pattern, base.clone());
    Search::new(&q).run(&mut |images, _| visit(images));
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyStrategy {
    /// Accept extensions in search order when they avoid everything
    /// accepted so far. Maximal, not necessarily maximum.
    #[default]
    Greedy,
    /// Maximum family by exhaustive packing; at most
    /// [`EXACT_FAMILY_BOUND`] extensions.
    Exact,
}

pub const EXACT_FAMILY_BOUND: usize = 20;

impl FromStr for FamilyStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(FamilyStrategy::Greedy),
            "exact" => Ok(FamilyStrategy::Exact),
            other => Err(Error::invalid(format!("unknown family strategy {other:?}"))),
        }
    }
}

/// Extensions whose ranges pairwise intersect exactly in the range of the
/// base map. The query limit is ignored.
pub fn max_disjoint_family(
    q: &ExtensionQuery<'_>,
    strategy: FamilyStrategy,
) -> Result<Vec<PartialEmbedding>> {
    q.validate()?;
    match strategy {
        FamilyStrategy::Greedy => {
            let mut family = Vec::new();
            let new: Vec<usize> = (0..q.pattern.n())
                .filter(|&i| q.base.images()[i].is_none())
                .collect();
            Search::new(q).run(&mut |images, blocked| {
                family.push(PartialEmbedding::from_images(images.to_vec()));
                for &i in &new {
                    blocked[images[i].unwrap() as usize] = true;
                }
                if new.is_empty() {
                    // Only the base map itself; nothing else can be disjoint.
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            Ok(family)
        }
        FamilyStrategy::Exact => {
            let all = enumerate_extensions(&ExtensionQuery {
                limit: Some(EXACT_FAMILY_BOUND as u64 + 1),
                ..q.clone()
            })?;
            if all.truncated {
                return Err(Error::too_big(
                    "extension count for exact packing",
                    EXACT_FAMILY_BOUND + 1,
                    EXACT_FAMILY_BOUND,
                ));
            }
            let base_range = q.base.range();
            let sets: Vec<Vec<Vertex>> = all
                .maps
                .iter()
                .map(|f| f.range().difference(&base_range).copied().collect())
                .collect();
            let m = sets.len();
            let mut conflict = vec![0u32; m];
            for i in 0..m {
                for j in 0..m {
                    if i != j && sets[i].iter().any(|v| sets[j].contains(v)) {
                        conflict[i] |= 1 << j;
                    }
                }
            }
            let mut best = 0u32;
            pack(&conflict, 0, 0, ((1u64 << m) - 1) as u32, &mut best);
            Ok((0..m)
                .filter(|&i| best >> i & 1 == 1)
                .map(|i| all.maps[i].clone())
                .collect())
        }
    }
}

// Maximum independent set in the conflict graph by include/exclude search.
fn pack(conflict: &[u32], i: usize, chosen: u32, allowed: u32, best: &mut u32) {
    if i == conflict.len() {
        if chosen.count_ones() > best.count_ones() {
            *best = chosen;
        }
        return;
    }
    if chosen.count_ones() + (allowed >> i).count_ones() <= best.count_ones() {
        return;
    }
    if allowed >> i & 1 == 1 {
        pack(conflict, i + 1, chosen | 1 << i, allowed & !conflict[i], best);
    }
    pack(conflict, i + 1, chosen, allowed & !(1 << i), best);
}

struct Search<'q> {
    target: &'q Structure,
    pattern: &'q Structure,
    images: Vec<Option<Vertex>>,
    // Indexed by target vertex; 0 unused.
    used: Vec<bool>,
    blocked: Vec<bool>,
    // Binary symbols, and relations of the pattern per vertex:
    // (symbol, other pattern vertex, pattern vertex is the source).
    links: Vec<Vec<(usize, usize, bool)>>,
    binary: Vec<usize>,
    general: Vec<usize>,
    all: Vec<Vertex>,
}

impl<'q> Search<'q> {
    fn new(q: &ExtensionQuery<'q>) -> Self {
        let p = q.pattern;
        let vocab = p.vocab();
        let binary: Vec<usize> = (0..vocab.len()).filter(|&s| vocab.symbols()[s].arity == 2).collect();
        let general: Vec<usize> = (0..vocab.len()).filter(|&s| vocab.symbols()[s].arity != 2).collect();
        let mut links = vec![Vec::new(); p.n()];
        for &s in &binary {
            for u in p.vertices() {
                for &w in p.out_neighbors(s, u) {
                    if w != u {
                        links[u as usize - 1].push((s, w as usize - 1, true));
                        links[w as usize - 1].push((s, u as usize - 1, false));
                    }
                }
            }
        }
        let mut used = vec![false; q.target.n() + 1];
        for (_, t) in q.base.pairs() {
            used[t as usize] = true;
        }
        Search {
            target: q.target,
            pattern: p,
            images: q.base.images().to_vec(),
            used,
            blocked: vec![false; q.target.n() + 1],
            links,
            binary,
            general,
            all: q.target.vertices().collect(),
        }
    }

    fn run<F>(&mut self, visit: &mut F)
    where
        F: FnMut(&[Option<Vertex>], &mut [bool]) -> ControlFlow<()>,
    {
        let _ = self.step(visit);
    }

    // Candidate list for pattern vertex `u` (0-based), before filtering.
    fn candidates(&self, u: usize) -> &[Vertex] {
        let mut best: &[Vertex] = &self.all;
        for &(s, w, u_is_source) in &self.links[u] {
            if let Some(fw) = self.images[w] {
                let list = if u_is_source {
                    self.target.in_neighbors(s, fw)
                } else {
                    self.target.out_neighbors(s, fw)
                };
                if list.len() < best.len() {
                    best = list;
                }
            }
        }
        best
    }

    fn consistent(&self, u: usize, x: Vertex) -> bool {
        let uv = u as Vertex + 1;
        for &s in &self.binary {
            if self.pattern.holds2(s, uv, uv) != self.target.holds2(s, x, x) {
                return false;
            }
        }
        for (w, im) in self.images.iter().enumerate() {
            let Some(fw) = *im else { continue };
            let wv = w as Vertex + 1;
            for &s in &self.binary {
                if self.pattern.holds2(s, uv, wv) != self.target.holds2(s, x, fw)
                    || self.pattern.holds2(s, wv, uv) != self.target.holds2(s, fw, x)
                {
                    return false;
                }
            }
        }
        if !self.general.is_empty() && !self.general_consistent(u, x) {
            return false;
        }
        true
    }

    // Checks every tuple over the mapped vertices plus `u` that mentions `u`.
    fn general_consistent(&self, u: usize, x: Vertex) -> bool {
        let mut dom: Vec<(Vertex, Vertex)> = self
            .images
            .iter()
            .enumerate()
            .filter_map(|(w, im)| im.map(|fw| (w as Vertex + 1, fw)))
            .collect();
        dom.push((u as Vertex + 1, x));
        let k = dom.len();
        for &s in &self.general {
            let arity = self.pattern.vocab().symbols()[s].arity;
            let total = k.pow(arity as u32);
            let mut src = vec![0; arity];
            let mut dst = vec![0; arity];
            for code in 0..total {
                let mut c = code;
                let mut has_u = false;
                for i in 0..arity {
                    let (a, b) = dom[c % k];
                    c /= k;
                    src[i] = a;
                    dst[i] = b;
                    has_u |= a == u as Vertex + 1;
                }
                if has_u && self.pattern.holds(s, &src) != self.target.holds(s, &dst) {
                    return false;
                }
            }
        }
        true
    }

    fn step<F>(&mut self, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Option<Vertex>], &mut [bool]) -> ControlFlow<()>,
    {
        let next = (0..self.images.len())
            .filter(|&u| self.images[u].is_none())
            .min_by_key(|&u| self.candidates(u).len());
        let Some(u) = next else {
            return visit(&self.images, &mut self.blocked);
        };
        let cands: Vec<Vertex> = self.candidates(u).to_vec();
        for x in cands {
            if self.used[x as usize] || self.blocked[x as usize] || !self.consistent(u, x) {
                continue;
            }
            self.images[u] = Some(x);
            self.used[x as usize] = true;
            let flow = self.step(visit);
            self.used[x as usize] = false;
            self.images[u] = None;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{StructureBuilder, Symbol, Vocabulary};

    fn pendant() -> Structure {
        Structure::complete_graph(2)
    }

    fn at(v: Vertex) -> PartialEmbedding {
        PartialEmbedding::from_pairs(2, &[(1, v)]).unwrap()
    }

    #[test]
    fn trivial_extension() {
        let k3 = Structure::complete_graph(3);
        let a = Structure::complete_graph(1);
        let q = ExtensionQuery::new(&k3, &a, PartialEmbedding::total(&[2]));
        assert_eq!(count_extensions(&q).unwrap(), Count { value: 1, capped: false });
        assert_eq!(enumerate_extensions(&q).unwrap().maps, vec![PartialEmbedding::total(&[2])]);
        assert_eq!(max_disjoint_family(&q, FamilyStrategy::Greedy).unwrap().len(), 1);
        assert_eq!(max_disjoint_family(&q, FamilyStrategy::Exact).unwrap().len(), 1);
    }

    #[test]
    fn pendant_in_triangle_and_path() {
        let b = pendant();
        let k3 = Structure::complete_graph(3);
        let q = ExtensionQuery::new(&k3, &b, at(1));
        assert_eq!(count_extensions(&q).unwrap().value, 2);
        let maps = enumerate_extensions(&q).unwrap().maps;
        assert_eq!(maps, vec![PartialEmbedding::total(&[1, 2]), PartialEmbedding::total(&[1, 3])]);
        assert_eq!(max_disjoint_family(&q, FamilyStrategy::Greedy).unwrap().len(), 2);

        let p3 = Structure::path_graph(3);
        assert_eq!(count_extensions(&ExtensionQuery::new(&p3, &b, at(1))).unwrap().value, 1);
    }

    #[test]
    fn limit_truncates() {
        let k3 = Structure::complete_graph(3);
        let b = pendant();
        let q = ExtensionQuery::new(&k3, &b, at(1)).with_limit(1);
        let e = enumerate_extensions(&q).unwrap();
        assert_eq!(e.maps.len(), 1);
        assert!(e.truncated);
        assert_eq!(count_extensions(&q).unwrap(), Count { value: 1, capped: true });
    }

    #[test]
    fn star_family() {
        let star = Structure::graph(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        let b = pendant();
        let q = ExtensionQuery::new(&star, &b, at(1));
        assert_eq!(max_disjoint_family(&q, FamilyStrategy::Greedy).unwrap().len(), 3);
        assert_eq!(max_disjoint_family(&q, FamilyStrategy::Exact).unwrap().len(), 3);
    }

    #[test]
    fn strategy_names() {
        assert_eq!("greedy".parse::<FamilyStrategy>().unwrap(), FamilyStrategy::Greedy);
        assert!("best".parse::<FamilyStrategy>().is_err());
    }

    #[test]
    fn bad_base_is_rejected() {
        let p3 = Structure::path_graph(3);
        let k2 = Structure::complete_graph(2);
        let f = PartialEmbedding::total(&[1, 3]);
        assert!(count_extensions(&ExtensionQuery::new(&p3, &k2, f)).is_err());
    }

    #[test]
    fn embedding_counts() {
        let p3 = Structure::path_graph(3);
        assert_eq!(count_embeddings(&Structure::complete_graph(1), &p3, None).unwrap().value, 3);
        assert_eq!(count_embeddings(&Structure::complete_graph(2), &p3, None).unwrap().value, 4);
        assert_eq!(count_embeddings(&Structure::complete_graph(3), &p3, None).unwrap().value, 0);
        // Induced: two non-adjacent vertices in P3 are only the ends.
        assert_eq!(count_embeddings(&Structure::graph(2, &[]).unwrap(), &p3, None).unwrap().value, 2);
    }

    #[test]
    fn ternary_relations() {
        let v = Vocabulary::new(vec![Symbol::new("R", 3)], false).unwrap();
        let mut b = StructureBuilder::new(v.clone(), 4);
        b.add("R", &[1, 2, 3]).unwrap();
        b.add("R", &[2, 3, 4]).unwrap();
        let m = b.build();
        let mut h = StructureBuilder::new(v, 3);
        h.add("R", &[1, 2, 3]).unwrap();
        let h = h.build();
        assert_eq!(count_embeddings(&h, &m, None).unwrap().value, 2);
    }

    #[test]
    fn exact_family_beats_greedy_order() {
        // Path 1-2-3-4 with base vertex mapped to nothing: K2 copies.
        // Greedy may pick {2,3} first; exact finds {1,2},{3,4}.
        let p4 = Structure::path_graph(4);
        let k2 = Structure::complete_graph(2);
        let q = ExtensionQuery::new(&p4, &k2, PartialEmbedding::empty(2));
        let exact = max_disjoint_family(&q, FamilyStrategy::Exact).unwrap();
        assert_eq!(exact.len(), 2);
        let greedy = max_disjoint_family(&q, FamilyStrategy::Greedy).unwrap();
        assert!(!greedy.is_empty() && greedy.len() <= 2);
    }
}
