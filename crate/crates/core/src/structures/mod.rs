//! Finite relational structures with universe `[n] = {1, ..., n}`.
//!
//! Vertices are 1-based `u32` labels. Positions carry meaning: the random
//! models assign edge probabilities by `|i - j|`, so restriction keeps the
//! original labels in a side map instead of discarding them.

mod amalgam;
mod canon;
mod embedding;
mod enumerate;
pub mod io;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use amalgam::{free_amalgam_build, free_amalgam_check, Amalgam, Side};
pub use canon::{
    canonical_form, canonical_form_bounded, pair_type, pair_type_of, CanonicalForm, PairType,
    DEFAULT_CANON_BOUND,
};
pub use embedding::{is_embedding, PartialEmbedding};
pub use enumerate::{enumerate_structures, StructureIter, ENUMERATION_BIT_BOUND};

pub type Vertex = u32;
pub type VertexSet = BTreeSet<Vertex>;

/// A relation symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    #[serde(default)]
    pub symmetric: bool,
    #[serde(default)]
    pub irreflexive: bool,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
            symmetric: false,
            irreflexive: false,
        }
    }

    pub fn symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }

    pub fn irreflexive(mut self) -> Self {
        self.irreflexive = true;
        self
    }
}

/// A finite relational vocabulary.
///
/// With `successor` set, the binary symbol `S` is reserved for the successor
/// relation `{(l, l+1)}`. Sampled full-universe structures carry exactly that
/// relation; submodels carry its induced part.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vocabulary {
    symbols: Vec<Symbol>,
    #[serde(default)]
    successor: bool,
}

pub const EDGE: &str = "E";
pub const SUCC: &str = "S";

impl Vocabulary {
    pub fn new(symbols: Vec<Symbol>, successor: bool) -> Result<Self> {
        for (i, s) in symbols.iter().enumerate() {
            if s.arity == 0 {
                return Err(Error::invalid(format!("symbol {} has arity 0", s.name)));
            }
            if s.symmetric && s.arity != 2 {
                return Err(Error::invalid(format!(
                    "symmetric symbol {} must be binary",
                    s.name
                )));
            }
            if symbols[..i].iter().any(|t| t.name == s.name) {
                return Err(Error::invalid(format!("duplicate symbol {}", s.name)));
            }
        }
        let vocab = Vocabulary { symbols, successor };
        if successor {
            match vocab.index_of(SUCC) {
                Some(i) if vocab.symbols[i].arity == 2 => {}
                _ => {
                    return Err(Error::invalid(
                        "successor flag requires a binary symbol S",
                    ))
                }
            }
        }
        Ok(vocab)
    }

    /// `{E}`: symmetric irreflexive edge relation.
    pub fn graph() -> Self {
        Vocabulary {
            symbols: vec![Symbol::new(EDGE, 2).symmetric().irreflexive()],
            successor: false,
        }
    }

    /// `{E, S}` with `S` the successor relation.
    pub fn graph_with_successor() -> Self {
        Vocabulary {
            symbols: vec![
                Symbol::new(EDGE, 2).symmetric().irreflexive(),
                Symbol::new(SUCC, 2).irreflexive(),
            ],
            successor: true,
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn has_successor(&self) -> bool {
        self.successor
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn successor_index(&self) -> Option<usize> {
        if self.successor {
            self.index_of(SUCC)
        } else {
            None
        }
    }

    pub fn edge_index(&self) -> Option<usize> {
        self.index_of(EDGE)
    }
}

/// Row-major `n x n` bit matrix, 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitMatrix {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n);
        (self.bits[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }
}

#[derive(Clone, Debug)]
pub(crate) struct BinaryRelation {
    bits: BitMatrix,
    out: Vec<Vec<Vertex>>,
    // `None` for symmetric relations, where in-lists equal out-lists.
    inn: Option<Vec<Vec<Vertex>>>,
}

impl BinaryRelation {
    fn from_pairs(n: usize, pairs: &BTreeSet<(Vertex, Vertex)>, symmetric: bool) -> Self {
        let mut bits = BitMatrix::new(n);
        let mut out = vec![Vec::new(); n];
        let mut inn = if symmetric {
            None
        } else {
            Some(vec![Vec::new(); n])
        };
        for &(u, v) in pairs {
            bits.set(u as usize - 1, v as usize - 1);
            out[u as usize - 1].push(v);
            if let Some(inn) = inn.as_mut() {
                inn[v as usize - 1].push(u);
            }
        }
        if let Some(inn) = inn.as_mut() {
            inn.iter_mut().for_each(|l| l.sort_unstable());
        }
        BinaryRelation { bits, out, inn }
    }

    pub(crate) fn from_symmetric_lists(n: usize, out: Vec<Vec<Vertex>>) -> Self {
        let mut bits = BitMatrix::new(n);
        for (u, list) in out.iter().enumerate() {
            for &v in list {
                bits.set(u, v as usize - 1);
            }
        }
        BinaryRelation {
            bits,
            out,
            inn: None,
        }
    }

    fn successor(n: usize) -> Self {
        let pairs: BTreeSet<(Vertex, Vertex)> =
            (1..n as Vertex).map(|l| (l, l + 1)).collect();
        BinaryRelation::from_pairs(n, &pairs, false)
    }

    #[inline]
    fn holds(&self, u: Vertex, v: Vertex) -> bool {
        self.bits.get(u as usize - 1, v as usize - 1)
    }

    fn in_list(&self, v: Vertex) -> &[Vertex] {
        match &self.inn {
            Some(inn) => &inn[v as usize - 1],
            None => &self.out[v as usize - 1],
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Relation {
    Binary(BinaryRelation),
    General(BTreeSet<Vec<Vertex>>),
}

/// A finite structure over a [`Vocabulary`] with universe `[n]`.
///
/// Immutable after construction.
#[derive(Clone)]
pub struct Structure {
    vocab: Arc<Vocabulary>,
    n: usize,
    rels: Vec<Relation>,
}

impl Structure {
    /// Structure with no tuples (except the successor relation when the
    /// vocabulary has one).
    pub fn empty(vocab: &Vocabulary, n: usize) -> Self {
        let mut b = StructureBuilder::new(vocab.clone(), n);
        if let Some(s) = vocab.successor_index() {
            for l in 1..n as Vertex {
                b.add_tuple(s, &[l, l + 1]).expect("successor tuple in range");
            }
        }
        b.build()
    }

    /// Graph on `[n]` with the given undirected edges.
    pub fn graph(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut b = StructureBuilder::new(Vocabulary::graph(), n);
        for &(u, v) in edges {
            b.add_tuple(0, &[u, v])?;
        }
        Ok(b.build())
    }

    /// Graph on `[n]` expanded by the exact successor relation.
    pub fn graph_with_successor(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let vocab = Vocabulary::graph_with_successor();
        let mut b = StructureBuilder::new(vocab, n);
        for &(u, v) in edges {
            b.add_tuple(0, &[u, v])?;
        }
        for l in 1..n as Vertex {
            b.add_tuple(1, &[l, l + 1])?;
        }
        Ok(b.build())
    }

    pub fn complete_graph(n: usize) -> Self {
        let edges: Vec<_> = (1..=n as Vertex)
            .flat_map(|u| ((u + 1)..=n as Vertex).map(move |v| (u, v)))
            .collect();
        Structure::graph(n, &edges).expect("edges in range")
    }

    pub fn path_graph(n: usize) -> Self {
        let edges: Vec<_> = (1..n as Vertex).map(|u| (u, u + 1)).collect();
        Structure::graph(n, &edges).expect("edges in range")
    }

    pub(crate) fn from_relations(vocab: Arc<Vocabulary>, n: usize, rels: Vec<Relation>) -> Self {
        debug_assert_eq!(vocab.len(), rels.len());
        Structure { vocab, n, rels }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub(crate) fn vocab_arc(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + Clone {
        1..=self.n as Vertex
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v >= 1 && v as usize <= self.n
    }

    /// Truth of `sym(tuple)`. Out-of-range entries give `false`.
    pub fn holds(&self, sym: usize, tuple: &[Vertex]) -> bool {
        if !tuple.iter().all(|&v| self.contains(v)) {
            return false;
        }
        match &self.rels[sym] {
            Relation::Binary(r) => tuple.len() == 2 && r.holds(tuple[0], tuple[1]),
            Relation::General(set) => set.contains(tuple),
        }
    }

    #[inline]
    pub(crate) fn holds2(&self, sym: usize, u: Vertex, v: Vertex) -> bool {
        match &self.rels[sym] {
            Relation::Binary(r) => r.holds(u, v),
            Relation::General(_) => false,
        }
    }

    pub(crate) fn is_binary(&self, sym: usize) -> bool {
        matches!(self.rels[sym], Relation::Binary(_))
    }

    /// Edge test for the `E` symbol; `false` when the vocabulary has none.
    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        match self.vocab.edge_index() {
            Some(e) => self.contains(u) && self.contains(v) && self.holds2(e, u, v),
            None => false,
        }
    }

    /// `{w : sym(v, w)}` for a binary symbol, sorted.
    pub fn out_neighbors(&self, sym: usize, v: Vertex) -> &[Vertex] {
        match &self.rels[sym] {
            Relation::Binary(r) => &r.out[v as usize - 1],
            Relation::General(_) => &[],
        }
    }

    /// `{w : sym(w, v)}` for a binary symbol, sorted.
    pub fn in_neighbors(&self, sym: usize, v: Vertex) -> &[Vertex] {
        match &self.rels[sym] {
            Relation::Binary(r) => r.in_list(v),
            Relation::General(_) => &[],
        }
    }

    /// Neighbors under `E`.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        match self.vocab.edge_index() {
            Some(e) => self.out_neighbors(e, v),
            None => &[],
        }
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    /// All tuples of `sym`, sorted lexicographically.
    pub fn tuples(&self, sym: usize) -> Vec<Vec<Vertex>> {
        match &self.rels[sym] {
            Relation::Binary(r) => r
                .out
                .iter()
                .enumerate()
                .flat_map(|(u, l)| l.iter().map(move |&v| vec![u as Vertex + 1, v]))
                .collect(),
            Relation::General(set) => set.iter().cloned().collect(),
        }
    }

    /// Undirected `E`-edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for u in self.vertices() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Whether `S` is exactly `{(l, l+1) : 1 <= l < n}`.
    pub fn has_exact_successor(&self) -> bool {
        match self.vocab.successor_index() {
            None => false,
            Some(s) => {
                let t = self.tuples(s);
                t.len() == self.n.saturating_sub(1)
                    && t.iter().all(|p| p[1] == p[0] + 1)
            }
        }
    }

    /// Range, symmetry and irreflexivity invariants, plus `S` being a subset
    /// of the successor relation when the vocabulary has one.
    pub fn check_invariants(&self) -> Result<()> {
        for (i, sym) in self.vocab.symbols().iter().enumerate() {
            for t in self.tuples(i) {
                if t.len() != sym.arity || !t.iter().all(|&v| self.contains(v)) {
                    return Err(Error::invalid(format!("bad tuple {t:?} for {}", sym.name)));
                }
                if sym.irreflexive && t.windows(2).any(|w| w[0] == w[1]) && t.len() == 2 {
                    return Err(Error::invalid(format!("reflexive tuple in {}", sym.name)));
                }
                if sym.symmetric && !self.holds(i, &[t[1], t[0]]) {
                    return Err(Error::invalid(format!("{} not symmetric at {t:?}", sym.name)));
                }
                if Some(i) == self.vocab.successor_index() && t[1] != t[0] + 1 {
                    return Err(Error::invalid(format!("S tuple {t:?} is not a successor pair")));
                }
            }
        }
        Ok(())
    }

    /// Induced substructure on `x`, relabelled `1..=|x|` in increasing order
    /// of the original labels.
    pub fn restrict(&self, x: &VertexSet) -> Result<Restriction> {
        if let Some(&bad) = x.iter().find(|&&v| !self.contains(v)) {
            return Err(Error::invalid(format!(
                "vertex {bad} outside universe [1, {}]",
                self.n
            )));
        }
        let labels: Vec<Vertex> = x.iter().copied().collect();
        let mut local = vec![0 as Vertex; self.n + 1];
        for (i, &v) in labels.iter().enumerate() {
            local[v as usize] = i as Vertex + 1;
        }
        let mut b = StructureBuilder::new_arc(self.vocab.clone(), labels.len());
        for (s, rel) in self.rels.iter().enumerate() {
            match rel {
                Relation::Binary(r) => {
                    for &u in &labels {
                        for &v in &r.out[u as usize - 1] {
                            if local[v as usize] != 0 {
                                b.push_raw(s, vec![local[u as usize], local[v as usize]]);
                            }
                        }
                    }
                }
                Relation::General(set) => {
                    for t in set {
                        if t.iter().all(|&v| local[v as usize] != 0) {
                            b.push_raw(s, t.iter().map(|&v| local[v as usize]).collect());
                        }
                    }
                }
            }
        }
        Ok(Restriction {
            structure: b.build(),
            labels,
        })
    }

    /// Relabel by a permutation `perm[v-1] = new label of v`.
    pub fn relabel(&self, perm: &[Vertex]) -> Result<Structure> {
        if perm.len() != self.n {
            return Err(Error::invalid("permutation length differs from n"));
        }
        let mut seen = vec![false; self.n + 1];
        for &p in perm {
            if !self.contains(p) || std::mem::replace(&mut seen[p as usize], true) {
                return Err(Error::invalid("not a permutation"));
            }
        }
        let mut b = StructureBuilder::new_arc(self.vocab.clone(), self.n);
        for s in 0..self.rels.len() {
            for t in self.tuples(s) {
                b.push_raw(s, t.iter().map(|&v| perm[v as usize - 1]).collect());
            }
        }
        Ok(b.build())
    }
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.vocab == other.vocab
            && (0..self.rels.len()).all(|s| self.tuples(s) == other.tuples(s))
    }
}

impl Eq for Structure {}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Structure");
        d.field("n", &self.n);
        for (i, s) in self.vocab.symbols().iter().enumerate() {
            d.field(&s.name, &self.tuples(i));
        }
        d.finish()
    }
}

/// Result of [`Structure::restrict`]: the induced structure and the original
/// label of each new vertex (`labels[i]` is the original of `i + 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub structure: Structure,
    pub labels: Vec<Vertex>,
}

impl Restriction {
    pub fn original(&self, v: Vertex) -> Vertex {
        self.labels[v as usize - 1]
    }

    pub fn local(&self, original: Vertex) -> Option<Vertex> {
        self.labels
            .binary_search(&original)
            .ok()
            .map(|i| i as Vertex + 1)
    }

    pub fn to_original(&self, set: &VertexSet) -> VertexSet {
        set.iter().map(|&v| self.original(v)).collect()
    }

    pub fn to_local(&self, set: &VertexSet) -> VertexSet {
        set.iter().filter_map(|&v| self.local(v)).collect()
    }
}

/// Incremental construction of a [`Structure`]. Symmetric symbols are closed
/// under swapping automatically.
pub struct StructureBuilder {
    vocab: Arc<Vocabulary>,
    n: usize,
    tuples: Vec<BTreeSet<Vec<Vertex>>>,
}

impl StructureBuilder {
    pub fn new(vocab: Vocabulary, n: usize) -> Self {
        Self::new_arc(Arc::new(vocab), n)
    }

    pub(crate) fn new_arc(vocab: Arc<Vocabulary>, n: usize) -> Self {
        let tuples = vec![BTreeSet::new(); vocab.len()];
        StructureBuilder { vocab, n, tuples }
    }

    pub fn add(&mut self, name: &str, tuple: &[Vertex]) -> Result<&mut Self> {
        let sym = self
            .vocab
            .index_of(name)
            .ok_or_else(|| Error::invalid(format!("unknown symbol {name}")))?;
        self.add_tuple(sym, tuple)
    }

    pub fn add_tuple(&mut self, sym: usize, tuple: &[Vertex]) -> Result<&mut Self> {
        let s = self
            .vocab
            .symbols()
            .get(sym)
            .ok_or_else(|| Error::invalid(format!("symbol index {sym} out of range")))?;
        if tuple.len() != s.arity {
            return Err(Error::Arity {
                symbol: s.name.clone(),
                expected: s.arity,
                found: tuple.len(),
            });
        }
        if let Some(&bad) = tuple.iter().find(|&&v| v == 0 || v as usize > self.n) {
            return Err(Error::invalid(format!(
                "vertex {bad} outside universe [1, {}]",
                self.n
            )));
        }
        if s.irreflexive && s.arity == 2 && tuple[0] == tuple[1] {
            return Err(Error::invalid(format!(
                "{} is irreflexive but got ({}, {})",
                s.name, tuple[0], tuple[1]
            )));
        }
        let symmetric = s.symmetric;
        self.push_raw(sym, tuple.to_vec());
        if symmetric {
            self.push_raw(sym, vec![tuple[1], tuple[0]]);
        }
        Ok(self)
    }

    pub(crate) fn push_raw(&mut self, sym: usize, tuple: Vec<Vertex>) {
        self.tuples[sym].insert(tuple);
    }

    pub fn build(self) -> Structure {
        let StructureBuilder { vocab, n, tuples } = self;
        let rels = vocab
            .symbols()
            .iter()
            .zip(tuples)
            .map(|(s, set)| {
                if s.arity == 2 {
                    let pairs = set.iter().map(|t| (t[0], t[1])).collect();
                    Relation::Binary(BinaryRelation::from_pairs(n, &pairs, s.symmetric))
                } else {
                    Relation::General(set)
                }
            })
            .collect();
        Structure { vocab, n, rels }
    }
}

pub(crate) fn successor_relation(n: usize) -> Relation {
    Relation::Binary(BinaryRelation::successor(n))
}

pub(crate) fn symmetric_relation(n: usize, out: Vec<Vec<Vertex>>) -> Relation {
    Relation::Binary(BinaryRelation::from_symmetric_lists(n, out))
}

/// Convenience for building vertex sets in tests and examples.
pub fn vset<I: IntoIterator<Item = Vertex>>(it: I) -> VertexSet {
    it.into_iter().collect()
}
