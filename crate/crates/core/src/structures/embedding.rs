use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Structure, Vertex, VertexSet};
use crate::error::{Error, Result};

/// Partial map from the vertices of a source structure into a target.
/// `images[v - 1]` is the image of source vertex `v`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartialEmbedding {
    images: Vec<Option<Vertex>>,
}

impl PartialEmbedding {
    /// The nowhere-defined map on a source of size `n`.
    pub fn empty(n: usize) -> Self {
        PartialEmbedding {
            images: vec![None; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        PartialEmbedding {
            images: (1..=n as Vertex).map(Some).collect(),
        }
    }

    /// Total map `v -> images[v - 1]`.
    pub fn total(images: &[Vertex]) -> Self {
        PartialEmbedding {
            images: images.iter().map(|&v| Some(v)).collect(),
        }
    }

    pub fn from_images(images: Vec<Option<Vertex>>) -> Self {
        PartialEmbedding { images }
    }

    pub fn from_pairs(n: usize, pairs: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut f = Self::empty(n);
        for &(a, b) in pairs {
            f.set(a, b)?;
        }
        Ok(f)
    }

    pub fn source_size(&self) -> usize {
        self.images.len()
    }

    pub fn get(&self, v: Vertex) -> Option<Vertex> {
        self.images.get((v as usize).checked_sub(1)?).copied().flatten()
    }

    pub fn set(&mut self, v: Vertex, image: Vertex) -> Result<()> {
        match self.images.get_mut((v as usize).wrapping_sub(1)) {
            Some(slot) => {
                *slot = Some(image);
                Ok(())
            }
            None => Err(Error::invalid(format!(
                "vertex {v} outside source of size {}",
                self.images.len()
            ))),
        }
    }

    pub fn unset(&mut self, v: Vertex) {
        if let Some(slot) = self.images.get_mut((v as usize).wrapping_sub(1)) {
            *slot = None;
        }
    }

    pub fn images(&self) -> &[Option<Vertex>] {
        &self.images
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter_map(|(i, im)| im.map(|t| (i as Vertex + 1, t)))
    }

    pub fn domain(&self) -> VertexSet {
        self.pairs().map(|(a, _)| a).collect()
    }

    pub fn range(&self) -> VertexSet {
        self.pairs().map(|(_, b)| b).collect()
    }

    pub fn is_total(&self) -> bool {
        self.images.iter().all(Option::is_some)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = VertexSet::new();
        self.pairs().all(|(_, b)| seen.insert(b))
    }

    /// Whether `self` agrees with `other` on the domain of `other`.
    pub fn extends(&self, other: &PartialEmbedding) -> bool {
        other.pairs().all(|(a, b)| self.get(a) == Some(b))
    }

    /// Image of a set of source vertices; undefined points are skipped.
    pub fn image_of(&self, set: &VertexSet) -> VertexSet {
        set.iter().filter_map(|&v| self.get(v)).collect()
    }

    pub fn compose(&self, outer: &PartialEmbedding) -> PartialEmbedding {
        PartialEmbedding {
            images: self
                .images
                .iter()
                .map(|im| im.and_then(|v| outer.get(v)))
                .collect(),
        }
    }

    pub fn as_map(&self) -> BTreeMap<Vertex, Vertex> {
        self.pairs().collect()
    }
}

impl fmt::Debug for PartialEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.pairs()).finish()
    }
}

/// Whether `f` is an injective map of its domain into `m` that preserves and
/// reflects every relation of `a` restricted to that domain.
///
/// Non-injective maps, images outside `m` and mismatched vocabularies give
/// `false`.
pub fn is_embedding(f: &PartialEmbedding, a: &Structure, m: &Structure) -> bool {
    if f.source_size() != a.n() || a.vocab() != m.vocab() || !f.is_injective() {
        return false;
    }
    let pairs: Vec<(Vertex, Vertex)> = f.pairs().collect();
    if pairs.iter().any(|&(_, b)| !m.contains(b)) {
        return false;
    }
    let dom = f.domain();
    let rng = f.range();
    for s in 0..a.vocab().len() {
        if a.is_binary(s) {
            for &(u, fu) in &pairs {
                for &(v, fv) in &pairs {
                    if a.holds2(s, u, v) != m.holds2(s, fu, fv) {
                        return false;
                    }
                }
            }
        } else {
            for t in a.tuples(s) {
                if t.iter().all(|v| dom.contains(v)) {
                    let img: Vec<Vertex> = t.iter().map(|&v| f.get(v).unwrap()).collect();
                    if !m.holds(s, &img) {
                        return false;
                    }
                }
            }
            let inverse: BTreeMap<Vertex, Vertex> = pairs.iter().map(|&(a, b)| (b, a)).collect();
            for t in m.tuples(s) {
                if t.iter().all(|v| rng.contains(v)) {
                    let pre: Vec<Vertex> = t.iter().map(|v| inverse[v]).collect();
                    if !a.holds(s, &pre) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_submodel() {
        let p = Structure::path_graph(4);
        let sub = p.restrict(&[1, 2, 3].into_iter().collect()).unwrap();
        let f = PartialEmbedding::total(&sub.labels);
        assert!(is_embedding(&f, &sub.structure, &p));
    }

    #[test]
    fn edge_into_path_ends_fails() {
        let k2 = Structure::complete_graph(2);
        let p3 = Structure::path_graph(3);
        assert!(!is_embedding(&PartialEmbedding::total(&[1, 3]), &k2, &p3));
        assert!(is_embedding(&PartialEmbedding::total(&[2, 3]), &k2, &p3));
    }

    #[test]
    fn single_vertex_maps_anywhere() {
        let k1 = Structure::complete_graph(1);
        let p3 = Structure::path_graph(3);
        for v in 1..=3 {
            assert!(is_embedding(&PartialEmbedding::total(&[v]), &k1, &p3));
        }
    }

    #[test]
    fn non_injective_is_false() {
        let e = Structure::graph(2, &[]).unwrap();
        let p3 = Structure::path_graph(3);
        assert!(!is_embedding(&PartialEmbedding::total(&[1, 1]), &e, &p3));
    }

    #[test]
    fn partial_maps_check_only_domain() {
        let k3 = Structure::complete_graph(3);
        let p3 = Structure::path_graph(3);
        let f = PartialEmbedding::from_pairs(3, &[(1, 1), (2, 2)]).unwrap();
        assert!(is_embedding(&f, &k3, &p3));
        assert_eq!(f.domain(), [1, 2].into_iter().collect());
        assert!(!f.is_total());
    }
}
