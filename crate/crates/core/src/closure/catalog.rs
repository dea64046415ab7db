//! Closure catalogs: finite sets of pair types flagged algebraic or free.
//!
//! A raw catalog answers "is `(A, B)` algebraic" by lookup: reflexive pairs
//! always are, otherwise the pair type must be declared. A normalized
//! catalog answers by saturation inside `B`: starting from `S = A`, any
//! declared pair `(A1, B1)` embedded in `B` with `A1` landing in `S` adds its
//! image to `S`; the pair is algebraic when `S` reaches all of `B`. This
//! contains the enlarge-the-base monotonicity closure and chaining of
//! algebraic steps.

use std::collections::HashSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::embeddings::visit_extensions;
use crate::error::{Error, Result};
use crate::structures::{
    is_embedding, pair_type, PairType, PartialEmbedding, Structure, StructureBuilder, Vertex,
    VertexSet, Vocabulary,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Algebraic,
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub pair: PairType,
    #[serde(rename = "A_size")]
    pub a_size: usize,
    #[serde(rename = "B_size")]
    pub b_size: usize,
    pub flag: Flag,
}

/// Decoded algebraic entry: `pattern` is `B`, and `A = {1, ..., a}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Witness {
    pub pattern: Structure,
    pub a: usize,
}

#[derive(Clone, Debug)]
pub struct ClosureCatalog {
    vocab: Vocabulary,
    k_max: usize,
    provenance: String,
    normalized: bool,
    entries: Vec<CatalogEntry>,
    algebraic: HashSet<PairType>,
    witnesses: Vec<Witness>,
}

impl PartialEq for ClosureCatalog {
    fn eq(&self, other: &Self) -> bool {
        self.vocab == other.vocab
            && self.k_max == other.k_max
            && self.provenance == other.provenance
            && self.normalized == other.normalized
            && self.entries == other.entries
    }
}

#[derive(Serialize, Deserialize)]
struct CatalogFile {
    #[serde(default = "Vocabulary::graph")]
    vocabulary: Vocabulary,
    k_max: usize,
    #[serde(default)]
    provenance: String,
    #[serde(default)]
    normalized: bool,
    entries: Vec<CatalogEntry>,
}

impl ClosureCatalog {
    pub fn new(vocab: Vocabulary, k_max: usize, provenance: impl Into<String>) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::invalid("k_max must be at least 1"));
        }
        Ok(ClosureCatalog {
            vocab,
            k_max,
            provenance: provenance.into(),
            normalized: false,
            entries: Vec::new(),
            algebraic: HashSet::new(),
            witnesses: Vec::new(),
        })
    }

    /// Catalog with no declared pairs: only reflexive pairs are algebraic.
    pub fn empty(vocab: Vocabulary, k_max: usize) -> Result<Self> {
        Self::new(vocab, k_max, "hand-built")
    }

    /// Graph catalog declaring "common neighbour of an adjacent pair"
    /// algebraic.
    pub fn common_neighbor(k_max: usize) -> Result<Self> {
        let mut cat = Self::new(Vocabulary::graph(), k_max, "hand-built")?;
        let k3 = Structure::complete_graph(3);
        cat.insert_pair(&k3, &[1, 2].into(), Flag::Algebraic)?;
        Ok(cat)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// The same declarations read with saturation semantics.
    pub fn normalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    /// The same declarations read by plain lookup.
    pub fn raw(mut self) -> Self {
        self.normalized = false;
        self
    }

    /// Declare `pair` with `flag`, replacing an earlier flag for the same
    /// code. Codes that are not canonical are stored but never used as
    /// witnesses.
    pub fn insert(&mut self, pair: PairType, flag: Flag) -> Result<()> {
        if pair.b_size() > self.k_max {
            return Err(Error::invalid(format!(
                "pair {pair} has |B| = {} above k_max = {}",
                pair.b_size(),
                self.k_max
            )));
        }
        pair.decode(&self.vocab)?;
        if let Some(e) = self.entries.iter_mut().find(|e| e.pair == pair) {
            e.flag = flag;
        } else {
            self.entries.push(CatalogEntry {
                a_size: pair.a_size(),
                b_size: pair.b_size(),
                pair,
                flag,
            });
        }
        self.reindex();
        Ok(())
    }

    /// Declare the pair type of `(b|a, b)`.
    pub fn insert_pair(&mut self, b: &Structure, a: &VertexSet, flag: Flag) -> Result<PairType> {
        if b.vocab() != &self.vocab {
            return Err(Error::invalid("structure vocabulary differs from the catalog"));
        }
        let t = pair_type(b, a)?;
        self.insert(t.clone(), flag)?;
        Ok(t)
    }

    fn reindex(&mut self) {
        self.algebraic = self
            .entries
            .iter()
            .filter(|e| e.flag == Flag::Algebraic)
            .map(|e| e.pair.clone())
            .collect();
        self.witnesses = self
            .entries
            .iter()
            .filter(|e| e.flag == Flag::Algebraic && !e.pair.is_reflexive())
            .filter(|e| e.pair.is_canonical(&self.vocab))
            .filter_map(|e| e.pair.decode(&self.vocab).ok())
            .map(|(pattern, a)| Witness { pattern, a: a.len() })
            .collect();
    }

    /// Declared algebraic (lookup only; reflexive pairs are implicit).
    pub fn declares(&self, pair: &PairType) -> bool {
        self.algebraic.contains(pair)
    }

    /// Algebraic declarations whose code is not canonical; they never act
    /// as witnesses.
    pub fn orphans(&self) -> Vec<PairType> {
        self.entries
            .iter()
            .filter(|e| e.flag == Flag::Algebraic && !e.pair.is_canonical(&self.vocab))
            .map(|e| e.pair.clone())
            .collect()
    }

    pub(crate) fn witnesses(&self) -> &[Witness] {
        &self.witnesses
    }

    /// Whether `(b|a, b)` is algebraic under this catalog.
    pub fn is_algebraic(&self, b: &Structure, a: &VertexSet) -> Result<bool> {
        if b.vocab() != &self.vocab {
            return Err(Error::invalid("structure vocabulary differs from the catalog"));
        }
        if let Some(&v) = a.iter().find(|&&v| !b.contains(v)) {
            return Err(Error::invalid(format!("vertex {v} of A is not in B")));
        }
        if a.len() == b.n() {
            return Ok(true);
        }
        if self.normalized {
            Ok(self.saturate(b, a).len() == b.n())
        } else {
            Ok(self.algebraic.contains(&pair_type(b, a)?))
        }
    }

    /// Saturation of `start` inside `b` under the declared algebraic pairs.
    pub(crate) fn saturate(&self, b: &Structure, start: &VertexSet) -> VertexSet {
        let mut s = start.clone();
        loop {
            let before = s.len();
            for w in &self.witnesses {
                if w.pattern.n() > b.n() {
                    continue;
                }
                let pool: Vec<Vertex> = s.iter().copied().collect();
                let mut found = Vec::new();
                placements(b, w, &pool, None, |img| {
                    found.extend(img.iter().map(|v| v.unwrap()));
                    ControlFlow::Continue(())
                });
                s.extend(found);
            }
            if s.len() == before || s.len() == b.n() {
                return s;
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CatalogFile {
            vocabulary: self.vocab.clone(),
            k_max: self.k_max,
            provenance: self.provenance.clone(),
            normalized: self.normalized,
            entries: self.entries.clone(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::Internal(e.to_string()))
    }

    /// Read a catalog. Accepts the object written by [`Self::to_json`] or a
    /// bare list of entries (graph vocabulary, `k_max` = largest `|B|`).
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
        let file = if value.is_array() {
            let entries: Vec<CatalogEntry> = serde_json::from_value(value).map_err(json_err)?;
            CatalogFile {
                vocabulary: Vocabulary::graph(),
                k_max: entries.iter().map(|e| e.b_size).max().unwrap_or(1).max(1),
                provenance: String::new(),
                normalized: false,
                entries,
            }
        } else {
            serde_json::from_value(value).map_err(json_err)?
        };
        let mut cat = Self::new(file.vocabulary, file.k_max, file.provenance)?;
        cat.normalized = file.normalized;
        for e in file.entries {
            if e.a_size != e.pair.a_size() || e.b_size != e.pair.b_size() {
                return Err(Error::invalid(format!(
                    "entry {} declares sizes ({}, {}) but the code has ({}, {})",
                    e.pair,
                    e.a_size,
                    e.b_size,
                    e.pair.a_size(),
                    e.pair.b_size()
                )));
            }
            if cat.entries.iter().any(|f| f.pair == e.pair) {
                return Err(Error::invalid(format!("duplicate entry {}", e.pair)));
            }
            cat.insert(e.pair, e.flag)?;
        }
        Ok(cat)
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Visit the embeddings `g` of `w.pattern` into `m` whose anchor vertices
/// `1..=w.a` land in `pool`. `forced = (u, x)` additionally pins the
/// pattern vertex `u` (1-based) to `x`.
pub(crate) fn placements<F>(m: &Structure, w: &Witness, pool: &[Vertex], forced: Option<(Vertex, Vertex)>, mut visit: F)
where
    F: FnMut(&[Option<Vertex>]) -> ControlFlow<()>,
{
    let mut f = PartialEmbedding::empty(w.pattern.n());
    if let Some((u, x)) = forced {
        if (u as usize) <= w.a && !pool.contains(&x) {
            return;
        }
        if f.set(u, x).is_err() || !is_embedding(&f, &w.pattern, m) {
            return;
        }
    }
    let _ = anchors(m, w, pool, 1, &mut f, &mut visit);
}

fn anchors<F>(m: &Structure, w: &Witness, pool: &[Vertex], u: usize, f: &mut PartialEmbedding, visit: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[Option<Vertex>]) -> ControlFlow<()>,
{
    if u > w.a {
        let mut flow = ControlFlow::Continue(());
        visit_extensions(m, &w.pattern, f, |img| {
            flow = visit(img);
            flow
        });
        return flow;
    }
    let uv = u as Vertex;
    if f.get(uv).is_some() {
        return anchors(m, w, pool, u + 1, f, visit);
    }
    for &x in pool {
        if f.images().contains(&Some(x)) {
            continue;
        }
        f.set(uv, x).expect("vertex in range");
        if is_embedding(f, &w.pattern, m) {
            anchors(m, w, pool, u + 1, f, visit)?;
        }
        f.unset(uv);
    }
    ControlFlow::Continue(())
}

/// All structures on `n` vertices that occur as induced substructures of
/// some full-universe structure: with a successor vocabulary, `S` must be a
/// disjoint union of directed paths.
pub(crate) fn realizable_structures(n: usize, vocab: &Vocabulary) -> Result<Vec<Structure>> {
    let Some(si) = vocab.successor_index() else {
        return Ok(crate::structures::enumerate_structures(n, vocab)?.collect());
    };
    let free = Vocabulary::new(vocab.symbols().to_vec(), false)?;
    let mut out = Vec::new();
    for m in crate::structures::enumerate_structures(n, &free)? {
        let s = m.tuples(si);
        let mut outd = vec![0; n + 1];
        let mut ind = vec![0; n + 1];
        for t in &s {
            outd[t[0] as usize] += 1;
            ind[t[1] as usize] += 1;
        }
        if outd.iter().chain(&ind).any(|&d| d > 1) {
            continue;
        }
        // With degrees at most one, a cycle is the only obstruction: every
        // vertex on a cycle has in-degree one, so walk from the sources.
        let mut on_path = 0;
        for v in 1..=n {
            if ind[v] == 0 {
                let mut x = v as Vertex;
                on_path += 1;
                while let Some(t) = s.iter().find(|t| t[0] == x) {
                    x = t[1];
                    on_path += 1;
                }
            }
        }
        if on_path != n {
            continue;
        }
        let mut b = StructureBuilder::new(vocab.clone(), n);
        for sym in 0..vocab.len() {
            for t in m.tuples(sym) {
                b.add_tuple(sym, &t)?;
            }
        }
        out.push(b.build());
    }
    Ok(out)
}
