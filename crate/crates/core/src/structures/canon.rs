//! Brute-force canonical labelling with a hard size bound.
//!
//! A relabelling is admissible when it places the distinct parameters first
//! (in order of first occurrence), then the marked set, then everything else,
//! and additionally respects a sorted vertex-invariant refinement inside each
//! block. The code is the lexicographically least incidence string over all
//! admissible relabellings. Branches are pruned against the best prefix, and
//! interchangeable twins are only tried once per slot.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Structure, StructureBuilder, Vertex, VertexSet, Vocabulary};
use crate::error::{Error, Result};

pub const DEFAULT_CANON_BOUND: usize = 10;

/// Isomorphism-class key of a structure with a parameter tuple and a marked
/// vertex set. Ordering is total and structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct CanonicalForm {
    n: u32,
    // For each parameter slot, the index of its first occurrence.
    params: Vec<u32>,
    marked: u32,
    bits: Vec<u8>,
}

/// Concrete representative recovered from a [`CanonicalForm`]: parameters
/// sit at positions `1..=k`, marked vertices right after them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub structure: Structure,
    pub params: Vec<Vertex>,
    pub marked: VertexSet,
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn param_len(&self) -> usize {
        self.params.len()
    }

    pub fn distinct_params(&self) -> usize {
        self.params
            .iter()
            .enumerate()
            .filter(|&(i, &p)| p as usize == i)
            .count()
    }

    pub fn marked(&self) -> usize {
        self.marked as usize
    }

    pub fn code(&self) -> String {
        self.to_string()
    }

    /// Rebuild the representative structure. Fails when the bit string does
    /// not fit the vocabulary.
    pub fn decode(&self, vocab: &Vocabulary) -> Result<Decoded> {
        let n = self.n();
        let templates = templates(vocab, n);
        let expected: usize = templates.iter().map(Vec::len).sum();
        if expected != self.bits.len() {
            return Err(Error::invalid(format!(
                "code has {} incidence bits, vocabulary needs {expected}",
                self.bits.len()
            )));
        }
        let k = self.distinct_params();
        if k + self.marked() > n {
            return Err(Error::invalid("code marks more vertices than it has"));
        }
        let mut b = StructureBuilder::new(vocab.clone(), n);
        let mut bits = self.bits.iter();
        for slot in &templates {
            for (sym, t) in slot {
                if *bits.next().unwrap() == 1 {
                    let tuple: Vec<Vertex> = t.iter().map(|&p| p as Vertex + 1).collect();
                    b.add_tuple(*sym, &tuple)?;
                }
            }
        }
        let mut slot_of = Vec::new();
        let mut next = 0u32;
        for (i, &p) in self.params.iter().enumerate() {
            if p as usize == i {
                slot_of.push(next);
                next += 1;
            } else {
                if p as usize >= i {
                    return Err(Error::invalid("malformed parameter pattern"));
                }
                slot_of.push(slot_of[p as usize]);
            }
        }
        Ok(Decoded {
            structure: b.build(),
            params: slot_of.iter().map(|&s| s + 1).collect(),
            marked: (k as Vertex + 1..=(k + self.marked()) as Vertex).collect(),
        })
    }

    /// Whether this code is the canonical code of its own decoding.
    pub fn is_canonical(&self, vocab: &Vocabulary) -> bool {
        match self.decode(vocab) {
            Ok(d) => canonical_labeling(&d.structure, &d.params, &d.marked, usize::MAX)
                .map(|(c, _)| &c == self)
                .unwrap_or(false),
            Err(_) => false,
        }
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(u32::to_string).collect();
        let bits: String = self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        write!(f, "{}:{}:{}:{}", self.n, params.join("."), self.marked, bits)
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({self})")
    }
}

impl FromStr for CanonicalForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("malformed canonical code {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let n = parts[0].parse().map_err(|_| bad())?;
        let params = if parts[1].is_empty() {
            Vec::new()
        } else {
            parts[1]
                .split('.')
                .map(|p| p.parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        let marked = parts[2].parse().map_err(|_| bad())?;
        let bits = parts[3]
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(bad()),
            })
            .collect::<Result<_>>()?;
        Ok(CanonicalForm {
            n,
            params,
            marked,
            bits,
        })
    }
}

impl From<CanonicalForm> for String {
    fn from(c: CanonicalForm) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for CanonicalForm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Canonical form of `(m, params)` with the default size bound.
pub fn canonical_form(m: &Structure, params: &[Vertex]) -> Result<CanonicalForm> {
    canonical_form_bounded(m, params, &VertexSet::new(), DEFAULT_CANON_BOUND)
}

/// Canonical form of `m` with a parameter tuple and a marked vertex set.
pub fn canonical_form_bounded(
    m: &Structure,
    params: &[Vertex],
    marked: &VertexSet,
    bound: usize,
) -> Result<CanonicalForm> {
    canonical_labeling(m, params, marked, bound).map(|(c, _)| c)
}

/// Isomorphism type of a pair `A ⊆ B` where `A` is a set of vertices of `B`
/// carrying the induced structure.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PairType(CanonicalForm);

impl PairType {
    pub fn a_size(&self) -> usize {
        self.0.marked()
    }

    pub fn b_size(&self) -> usize {
        self.0.n()
    }

    pub fn is_reflexive(&self) -> bool {
        self.a_size() == self.b_size()
    }

    pub fn form(&self) -> &CanonicalForm {
        &self.0
    }

    pub fn code(&self) -> String {
        self.0.code()
    }

    /// Representative `(B, A)` with `A = {1, ..., |A|}`.
    pub fn decode(&self, vocab: &Vocabulary) -> Result<(Structure, VertexSet)> {
        let d = self.0.decode(vocab)?;
        Ok((d.structure, d.marked))
    }

    pub fn is_canonical(&self, vocab: &Vocabulary) -> bool {
        self.0.param_len() == 0 && self.0.is_canonical(vocab)
    }

    /// Wrap a code without checking canonicity.
    pub fn from_form(form: CanonicalForm) -> Self {
        PairType(form)
    }
}

impl fmt::Display for PairType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for PairType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PairType({})", self.0)
    }
}

impl FromStr for PairType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let form: CanonicalForm = s.parse()?;
        if form.param_len() != 0 {
            return Err(Error::invalid("pair codes carry no parameters"));
        }
        Ok(PairType(form))
    }
}

/// Pair type of `(b|a, b)` for a vertex set `a` of `b`.
pub fn pair_type(b: &Structure, a: &VertexSet) -> Result<PairType> {
    if let Some(&v) = a.iter().find(|&&v| !b.contains(v)) {
        return Err(Error::invalid(format!("vertex {v} of A is not in B")));
    }
    canonical_labeling(b, &[], a, DEFAULT_CANON_BOUND).map(|(c, _)| PairType(c))
}

/// Pair type of `(a, b)` where `f` embeds `a` into `b`.
pub fn pair_type_of(a: &Structure, b: &Structure, f: &super::PartialEmbedding) -> Result<PairType> {
    if !f.is_total() || !super::is_embedding(f, a, b) {
        return Err(Error::invalid("A is not a submodel of B under the given map"));
    }
    pair_type(b, &f.range())
}

/// Tuple templates per slot: for slot `j`, all `(symbol, positions)` whose
/// largest position is `j`, in lexicographic order. Positions are 0-based.
pub(super) fn templates(vocab: &Vocabulary, n: usize) -> Vec<Vec<(usize, Vec<usize>)>> {
    let mut out = vec![Vec::new(); n];
    for (j, slot) in out.iter_mut().enumerate() {
        for (s, sym) in vocab.symbols().iter().enumerate() {
            if sym.symmetric {
                for i in 0..j {
                    slot.push((s, vec![i, j]));
                }
                if !sym.irreflexive {
                    slot.push((s, vec![j, j]));
                }
                continue;
            }
            // All of [0, j]^arity in lexicographic order, keeping max = j.
            let base = j + 1;
            for code in 0..base.pow(sym.arity as u32) {
                let mut t = vec![0usize; sym.arity];
                let mut c = code;
                for x in t.iter_mut().rev() {
                    *x = c % base;
                    c /= base;
                }
                let reflexive_pair = sym.arity == 2 && t[0] == t[1];
                if t.contains(&j) && !(sym.irreflexive && reflexive_pair) {
                    slot.push((s, t));
                }
            }
        }
    }
    out
}

/// Canonical form together with the labelling achieving it:
/// `order[p]` is the original vertex placed at position `p + 1`.
pub(crate) fn canonical_labeling(
    m: &Structure,
    params: &[Vertex],
    marked: &VertexSet,
    bound: usize,
) -> Result<(CanonicalForm, Vec<Vertex>)> {
    let n = m.n();
    if n > bound {
        return Err(Error::too_big("canonical form input", n, bound));
    }
    for &p in params.iter().chain(marked) {
        if !m.contains(p) {
            return Err(Error::invalid(format!("vertex {p} outside universe")));
        }
    }

    let mut pattern = Vec::with_capacity(params.len());
    let mut distinct: Vec<Vertex> = Vec::new();
    for (i, &p) in params.iter().enumerate() {
        let first = params[..i].iter().position(|&q| q == p).unwrap_or(i);
        pattern.push(first as u32);
        if first == i {
            distinct.push(p);
        }
    }
    let marked_rest: Vec<Vertex> = marked
        .iter()
        .copied()
        .filter(|v| !distinct.contains(v))
        .collect();

    // Block 0..k: one class per parameter. Then marked, then the rest, each
    // split by a sorted invariant.
    let k = distinct.len();
    let mut class_of = vec![usize::MAX; n];
    let mut slot_class = Vec::with_capacity(n);
    for (i, &p) in distinct.iter().enumerate() {
        class_of[p as usize - 1] = i;
        slot_class.push(i);
    }
    let mut next_class = k;
    let rest: Vec<Vertex> = m
        .vertices()
        .filter(|v| !distinct.contains(v) && !marked.contains(v))
        .collect();
    for block in [&marked_rest, &rest] {
        let mut keyed: Vec<(Vec<usize>, Vertex)> = block
            .iter()
            .map(|&v| (invariant(m, v, &distinct), v))
            .collect();
        keyed.sort();
        let mut prev: Option<&Vec<usize>> = None;
        for (key, v) in &keyed {
            if prev != Some(key) {
                if prev.is_some() {
                    next_class += 1;
                }
                prev = Some(key);
            }
            class_of[*v as usize - 1] = next_class;
            slot_class.push(next_class);
        }
        if prev.is_some() {
            next_class += 1;
        }
    }

    let mut c = Canonizer {
        m,
        templates: templates(m.vocab(), n),
        slot_class,
        class_of,
        twins: twin_matrix(m, &distinct),
        order: Vec::with_capacity(n),
        used: vec![false; n],
        cur: Vec::new(),
        best: None,
        best_order: Vec::new(),
    };
    c.dfs(0, false);
    let bits = c.best.take().unwrap_or_default();
    Ok((
        CanonicalForm {
            n: n as u32,
            params: pattern,
            marked: marked_rest.len() as u32,
            bits,
        },
        c.best_order,
    ))
}

fn invariant(m: &Structure, v: Vertex, params: &[Vertex]) -> Vec<usize> {
    let mut key = Vec::new();
    for s in 0..m.vocab().len() {
        let arity = m.vocab().symbols()[s].arity;
        let mut counts = vec![0usize; arity];
        for t in m.tuples(s) {
            for (i, &x) in t.iter().enumerate() {
                if x == v {
                    counts[i] += 1;
                }
            }
        }
        key.extend(counts);
        if arity == 2 {
            for &p in params {
                key.push(m.holds(s, &[v, p]) as usize);
                key.push(m.holds(s, &[p, v]) as usize);
            }
        }
    }
    key
}

// twins[u][v]: swapping u and v is an automorphism fixing all parameters.
fn twin_matrix(m: &Structure, params: &[Vertex]) -> Vec<Vec<bool>> {
    let n = m.n();
    let tuples: Vec<Vec<Vec<Vertex>>> = (0..m.vocab().len()).map(|s| m.tuples(s)).collect();
    let mut twins = vec![vec![false; n]; n];
    for u in 1..=n as Vertex {
        for v in (u + 1)..=n as Vertex {
            if params.contains(&u) || params.contains(&v) {
                continue;
            }
            let swap = |x: Vertex| {
                if x == u {
                    v
                } else if x == v {
                    u
                } else {
                    x
                }
            };
            let ok = tuples.iter().enumerate().all(|(s, ts)| {
                ts.iter().all(|t| {
                    let img: Vec<Vertex> = t.iter().map(|&x| swap(x)).collect();
                    m.holds(s, &img)
                })
            });
            twins[u as usize - 1][v as usize - 1] = ok;
            twins[v as usize - 1][u as usize - 1] = ok;
        }
    }
    twins
}

struct Canonizer<'a> {
    m: &'a Structure,
    templates: Vec<Vec<(usize, Vec<usize>)>>,
    slot_class: Vec<usize>,
    class_of: Vec<usize>,
    twins: Vec<Vec<bool>>,
    order: Vec<Vertex>,
    used: Vec<bool>,
    cur: Vec<u8>,
    best: Option<Vec<u8>>,
    best_order: Vec<Vertex>,
}

impl Canonizer<'_> {
    /// `less`: the current prefix is already strictly below the best one.
    /// Returns whether `best` was replaced inside this subtree.
    fn dfs(&mut self, j: usize, mut less: bool) -> bool {
        let n = self.m.n();
        if j == n {
            if self.best.is_none() || less {
                self.best = Some(self.cur.clone());
                self.best_order = self.order.clone();
                return true;
            }
            return false;
        }
        let mut updated = false;
        let mut tried: Vec<usize> = Vec::new();
        for v in 0..n {
            if self.used[v] || self.class_of[v] != self.slot_class[j] {
                continue;
            }
            if tried.iter().any(|&u| self.twins[u][v]) {
                continue;
            }
            tried.push(v);
            let start = self.cur.len();
            self.order.push(v as Vertex + 1);
            for (s, t) in &self.templates[j] {
                let tuple: Vec<Vertex> = t.iter().map(|&p| self.order[p]).collect();
                self.cur.push(self.m.holds(*s, &tuple) as u8);
            }
            let mut child_less = less;
            let mut prune = false;
            if !less {
                if let Some(best) = &self.best {
                    match self.cur[start..].cmp(&best[start..self.cur.len()]) {
                        std::cmp::Ordering::Less => child_less = true,
                        std::cmp::Ordering::Greater => prune = true,
                        std::cmp::Ordering::Equal => {}
                    }
                }
            }
            if !prune {
                self.used[v] = true;
                if self.dfs(j + 1, child_less) {
                    updated = true;
                    // The new best runs through this prefix.
                    less = false;
                }
                self.used[v] = false;
            }
            self.cur.truncate(start);
            self.order.pop();
        }
        updated
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::vset;

    #[test]
    fn triangle_labelings_agree() {
        let k3 = Structure::complete_graph(3);
        let a = canonical_form(&k3, &[]).unwrap();
        let b = canonical_form(&k3.relabel(&[2, 3, 1]).unwrap(), &[]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn path_differs_from_edge_plus_point() {
        let p3 = Structure::path_graph(3);
        let e = Structure::graph(3, &[(1, 2)]).unwrap();
        assert_ne!(canonical_form(&p3, &[]).unwrap(), canonical_form(&e, &[]).unwrap());
    }

    #[test]
    fn edge_with_either_endpoint() {
        let k2 = Structure::complete_graph(2);
        assert_eq!(
            canonical_form(&k2, &[1]).unwrap(),
            canonical_form(&k2, &[2]).unwrap()
        );
    }

    #[test]
    fn parameters_are_ordered() {
        let g = Structure::graph(3, &[(1, 2)]).unwrap();
        assert_ne!(
            canonical_form(&g, &[1, 3]).unwrap(),
            canonical_form(&g, &[3, 1]).unwrap().clone()
        );
        assert_eq!(
            canonical_form(&g, &[1, 3]).unwrap(),
            canonical_form(&g, &[2, 3]).unwrap()
        );
    }

    #[test]
    fn repeated_parameters() {
        let k2 = Structure::complete_graph(2);
        let c = canonical_form(&k2, &[1, 1]).unwrap();
        assert_ne!(c, canonical_form(&k2, &[1, 2]).unwrap());
        let d = c.decode(&Vocabulary::graph()).unwrap();
        assert_eq!(d.params, vec![1, 1]);
    }

    #[test]
    fn too_big_is_rejected() {
        let g = Structure::graph(11, &[]).unwrap();
        assert!(matches!(
            canonical_form(&g, &[]),
            Err(Error::UnsupportedSize { .. })
        ));
    }

    #[test]
    fn pair_types() {
        let k2 = Structure::complete_graph(2);
        let pendant = pair_type(&k2, &vset([1])).unwrap();
        assert_eq!(pendant, pair_type(&k2, &vset([2])).unwrap());
        assert_eq!(pendant.a_size(), 1);
        assert_eq!(pendant.b_size(), 2);

        let k3 = Structure::complete_graph(3);
        let common = pair_type(&k3, &vset([1, 2])).unwrap();
        assert_eq!(common, pair_type(&k3, &vset([2, 3])).unwrap());
        assert_ne!(common, pair_type(&Structure::path_graph(3), &vset([1, 2])).unwrap());

        let swapped = k2.relabel(&[2, 1]).unwrap();
        assert_eq!(
            pair_type(&k2, &VertexSet::new()).unwrap(),
            pair_type(&swapped, &VertexSet::new()).unwrap()
        );
        assert!(pair_type(&k2, &vset([3])).is_err());
    }

    #[test]
    fn code_round_trips_and_decodes() {
        let p = Structure::path_graph(4);
        let t = pair_type(&p, &vset([2, 3])).unwrap();
        let s = t.code();
        let back: PairType = s.parse().unwrap();
        assert_eq!(back, t);
        let (b, a) = t.decode(&Vocabulary::graph()).unwrap();
        assert_eq!(pair_type(&b, &a).unwrap(), t);
        assert!(t.is_canonical(&Vocabulary::graph()));
    }

    #[test]
    fn non_canonical_code_is_detected() {
        // 3 vertices, first one marked, edge only between the two unmarked.
        // The canonical code of this shape puts the lone edge elsewhere.
        let g = Structure::graph(3, &[(2, 3)]).unwrap();
        let canon = pair_type(&g, &vset([1])).unwrap();
        let bits = canon.code();
        let flipped: String = {
            let (head, tail) = bits.rsplit_once(':').unwrap();
            let rev: String = tail.chars().rev().collect();
            format!("{head}:{rev}")
        };
        let other: PairType = flipped.parse().unwrap();
        if other != canon {
            assert!(!other.is_canonical(&Vocabulary::graph()));
        }
    }

    #[test]
    fn successor_vocabulary_codes() {
        let a = Structure::graph_with_successor(3, &[(1, 3)]).unwrap();
        let b = Structure::graph_with_successor(3, &[(1, 2)]).unwrap();
        let ca = canonical_form(&a, &[]).unwrap();
        assert_ne!(ca, canonical_form(&b, &[]).unwrap());
        let d = ca.decode(&Vocabulary::graph_with_successor()).unwrap();
        assert_eq!(canonical_form(&d.structure, &[]).unwrap(), ca);
    }
}
