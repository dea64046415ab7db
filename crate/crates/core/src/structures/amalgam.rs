use super::{is_embedding, PartialEmbedding, Structure, StructureBuilder, Vertex, VertexSet};
use crate::error::{Error, Result};

/// Whether `c1` and `c2` are freely amalgamated over `b` inside `d`:
/// `c1 ∩ c2 ⊆ b`, and no tuple inside `c1 ∪ b ∪ c2` meets both
/// `c1 \ b` and `c2 \ b`.
pub fn free_amalgam_check(
    d: &Structure,
    b: &VertexSet,
    c1: &VertexSet,
    c2: &VertexSet,
) -> Result<bool> {
    for set in [b, c1, c2] {
        if let Some(&v) = set.iter().find(|&&v| !d.contains(v)) {
            return Err(Error::invalid(format!("vertex {v} outside universe")));
        }
    }
    if !c1.intersection(c2).all(|v| b.contains(v)) {
        return Ok(false);
    }
    let left: VertexSet = c1.union(b).copied().collect();
    let right: VertexSet = c2.union(b).copied().collect();
    let all: VertexSet = left.union(&right).copied().collect();
    for s in 0..d.vocab().len() {
        for t in d.tuples(s) {
            if !t.iter().all(|v| all.contains(v)) {
                continue;
            }
            if !t.iter().all(|v| left.contains(v)) && !t.iter().all(|v| right.contains(v)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One side of an amalgamation: a structure with an embedding of the shared
/// base into it.
#[derive(Clone, Debug)]
pub struct Side<'a> {
    pub structure: &'a Structure,
    pub base: PartialEmbedding,
}

/// Output of [`free_amalgam_build`]. The left side occupies `1..=|N1|` in
/// its own labels; the non-base vertices of the right side follow in
/// increasing order.
#[derive(Clone, Debug)]
pub struct Amalgam {
    pub structure: Structure,
    pub left: PartialEmbedding,
    pub right: PartialEmbedding,
    pub base: PartialEmbedding,
}

impl Amalgam {
    pub fn left_set(&self) -> VertexSet {
        self.left.range()
    }

    pub fn right_set(&self) -> VertexSet {
        self.right.range()
    }

    pub fn base_set(&self) -> VertexSet {
        self.base.range()
    }
}

/// Free amalgam of `left` and `right` over `n0`: the disjoint union glued
/// along the images of `n0`, with no tuples crossing between the two sides.
///
/// With the successor vocabulary, `S` is treated as an ordinary relation
/// here; the result carries the union of the two sides' `S` tuples.
pub fn free_amalgam_build(n0: &Structure, left: Side<'_>, right: Side<'_>) -> Result<Amalgam> {
    let vocab = n0.vocab();
    if left.structure.vocab() != vocab || right.structure.vocab() != vocab {
        return Err(Error::invalid("amalgam sides use different vocabularies"));
    }
    for (name, side) in [("left", &left), ("right", &right)] {
        if !side.base.is_total() || !is_embedding(&side.base, n0, side.structure) {
            return Err(Error::invalid(format!(
                "base map into the {name} side is not an embedding"
            )));
        }
    }
    let n1 = left.structure.n();
    let n2 = right.structure.n();
    let n = n1 + n2 - n0.n();

    let mut right_map = vec![0 as Vertex; n2 + 1];
    for (c, r) in right.base.pairs() {
        right_map[r as usize] = left.base.get(c).expect("total base map");
    }
    let mut next = n1 as Vertex;
    for v in 1..=n2 {
        if right_map[v] == 0 {
            next += 1;
            right_map[v] = next;
        }
    }

    let mut b = StructureBuilder::new_arc(n0.vocab_arc().clone(), n);
    for s in 0..vocab.len() {
        for t in left.structure.tuples(s) {
            b.push_raw(s, t);
        }
        for t in right.structure.tuples(s) {
            b.push_raw(s, t.iter().map(|&v| right_map[v as usize]).collect());
        }
    }
    let structure = b.build();
    // Base tuples appear on both sides; they coincide because both base maps
    // are embeddings of the same structure.
    Ok(Amalgam {
        structure,
        left: PartialEmbedding::identity(n1),
        right: PartialEmbedding::total(&right_map[1..]),
        base: left.base,
    })
}
