use std::sync::Arc;

use super::canon::templates;
use super::{Structure, StructureBuilder, Vertex, Vocabulary};
use crate::error::{Error, Result};

/// Largest number of free incidence bits [`enumerate_structures`] accepts
/// (graphs on up to 6 vertices).
pub const ENUMERATION_BIT_BOUND: usize = 20;

/// Every labelled structure on `[n]` over `vocab`, each exactly once. With the
/// successor flag set, `S` is fixed to the exact successor relation.
pub fn enumerate_structures(n: usize, vocab: &Vocabulary) -> Result<StructureIter> {
    let succ = vocab.successor_index();
    let free: Vec<(usize, Vec<Vertex>)> = templates(vocab, n)
        .into_iter()
        .flatten()
        .filter(|(s, _)| Some(*s) != succ)
        .map(|(s, t)| (s, t.into_iter().map(|p| p as Vertex + 1).collect()))
        .collect();
    if free.len() > ENUMERATION_BIT_BOUND {
        return Err(Error::too_big(
            "free incidence bits",
            free.len(),
            ENUMERATION_BIT_BOUND,
        ));
    }
    Ok(StructureIter {
        vocab: Arc::new(vocab.clone()),
        n,
        free,
        next: 0,
    })
}

pub struct StructureIter {
    vocab: Arc<Vocabulary>,
    n: usize,
    free: Vec<(usize, Vec<Vertex>)>,
    next: u64,
}

impl StructureIter {
    pub fn total(&self) -> u64 {
        1u64 << self.free.len()
    }
}

impl Iterator for StructureIter {
    type Item = Structure;

    fn next(&mut self) -> Option<Structure> {
        if self.next >= self.total() {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        let mut b = StructureBuilder::new_arc(self.vocab.clone(), self.n);
        for (i, (s, t)) in self.free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                b.add_tuple(*s, t).expect("template tuples are valid");
            }
        }
        if let Some(s) = self.vocab.successor_index() {
            for l in 1..self.n as Vertex {
                b.add_tuple(s, &[l, l + 1]).expect("successor tuple");
            }
        }
        Some(b.build())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total() - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for StructureIter {}
