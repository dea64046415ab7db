//! The addition theorem over free amalgams, as a checked composition table.
//!
//! For sides `N1`, `N2` containing a common base `N0`, the rank-`d` type of
//! the free amalgam over the base tuple is a function of the rank-`d` types
//! of the two sides over that tuple. [`amalgam_type_table`] enumerates sides
//! and records that function, failing loudly if any cell would need two
//! values.

use std::collections::BTreeMap;

use super::types::{rank_type, RankType};
use crate::error::{Error, Result};
use crate::structures::{
    enumerate_structures, free_amalgam_build, PartialEmbedding, Side, Structure, Vertex,
};

fn base_tuple(side: &Side<'_>) -> Vec<Vertex> {
    side.base.images().iter().map(|v| v.expect("total base map")).collect()
}

/// Given `(N1, c̄) ≡_d (N1', c̄)` and `(N2, c̄) ≡_d (N2', c̄)`, whether the
/// amalgam of `N1, N2` over `N0` is `≡_d` to the amalgam of `N1', N2'`, with
/// `c̄` the image of `N0`. Fails if the premise does not hold.
pub fn addition_check(
    n0: &Structure,
    n1: Side<'_>,
    n2: Side<'_>,
    n1p: Side<'_>,
    n2p: Side<'_>,
    d: usize,
) -> Result<bool> {
    for (a, b) in [(&n1, &n1p), (&n2, &n2p)] {
        if !a.base.is_total() || !b.base.is_total() {
            return Err(Error::invalid("base maps must be total"));
        }
        let ta = rank_type(a.structure, &base_tuple(a), d)?;
        let tb = rank_type(b.structure, &base_tuple(b), d)?;
        if ta != tb {
            return Err(Error::invalid("premise fails: sides are not d-equivalent over the base"));
        }
    }
    let left = free_amalgam_build(n0, n1, n2)?;
    let right = free_amalgam_build(n0, n1p, n2p)?;
    let tl = rank_type(&left.structure, &base_tuple_of(&left.base), d)?;
    let tr = rank_type(&right.structure, &base_tuple_of(&right.base), d)?;
    Ok(tl == tr)
}

fn base_tuple_of(f: &PartialEmbedding) -> Vec<Vertex> {
    f.images().iter().map(|v| v.expect("total base map")).collect()
}

/// Composition table: (type of `N1` over the base, type of `N2` over the
/// base) to the type of the amalgam over the base.
#[derive(Clone, Debug)]
pub struct TypeTable {
    pub depth: usize,
    pub base: Structure,
    pub max_side: usize,
    pub cells: BTreeMap<(RankType, RankType), RankType>,
    /// Number of side pairs combined while building the table.
    pub pairs_checked: usize,
    /// Number of labelled sides enumerated.
    pub sides: usize,
}

impl TypeTable {
    pub fn lookup(&self, t1: &RankType, t2: &RankType) -> Option<&RankType> {
        self.cells.get(&(t1.clone(), t2.clone()))
    }
}

/// All structures on `[s]`, `|N0| ≤ s ≤ max_side`, whose restriction to
/// `[|N0|]` is `n0`; the base embeds as the identity on `1..=|N0|`.
pub fn sides_over(n0: &Structure, max_side: usize) -> Result<Vec<Structure>> {
    let k = n0.n();
    let mut out = Vec::new();
    for s in k..=max_side {
        for m in enumerate_structures(s, n0.vocab())? {
            let head: Vec<Vertex> = (1..=k as Vertex).collect();
            if is_identity_embedding(n0, &m, &head) {
                out.push(m);
            }
        }
    }
    Ok(out)
}

fn is_identity_embedding(n0: &Structure, m: &Structure, head: &[Vertex]) -> bool {
    crate::structures::is_embedding(&PartialEmbedding::total(head), n0, m)
}

/// Build the composition table for all sides of size at most `max_side`
/// over `n0`. A cell receiving two different amalgam types is reported as
/// an internal error.
pub fn amalgam_type_table(n0: &Structure, d: usize, max_side: usize) -> Result<TypeTable> {
    let sides = sides_over(n0, max_side)?;
    let params: Vec<Vertex> = (1..=n0.n() as Vertex).collect();
    let types: Vec<RankType> = sides
        .iter()
        .map(|s| rank_type(s, &params, d))
        .collect::<Result<_>>()?;
    let mut cells: BTreeMap<(RankType, RankType), RankType> = BTreeMap::new();
    let mut pairs_checked = 0;
    for (i, s1) in sides.iter().enumerate() {
        for (j, s2) in sides.iter().enumerate() {
            let am = free_amalgam_build(
                n0,
                Side { structure: s1, base: PartialEmbedding::total(&params) },
                Side { structure: s2, base: PartialEmbedding::total(&params) },
            )?;
            let t = rank_type(&am.structure, &base_tuple_of(&am.base), d)?;
            pairs_checked += 1;
            let key = (types[i].clone(), types[j].clone());
            match cells.get(&key) {
                Some(prev) if *prev != t => {
                    return Err(Error::Internal(format!(
                        "composition table is two-valued at depth {d} for sides {s1:?} and {s2:?}"
                    )));
                }
                Some(_) => {}
                None => {
                    cells.insert(key, t);
                }
            }
        }
    }
    Ok(TypeTable {
        depth: d,
        base: n0.clone(),
        max_side,
        cells,
        pairs_checked,
        sides: sides.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isomorphic_sides() {
        let n0 = Structure::complete_graph(1);
        let k2 = Structure::complete_graph(2);
        let k2r = k2.relabel(&[2, 1]).unwrap();
        let side = |s, v| Side { structure: s, base: PartialEmbedding::total(&[v]) };
        assert!(addition_check(&n0, side(&k2, 1), side(&k2, 1), side(&k2r, 2), side(&k2, 1), 2).unwrap());
    }

    #[test]
    fn premise_is_checked() {
        let n0 = Structure::complete_graph(1);
        let k2 = Structure::complete_graph(2);
        let e2 = Structure::graph(2, &[]).unwrap();
        let side = |s, v| Side { structure: s, base: PartialEmbedding::total(&[v]) };
        assert!(addition_check(&n0, side(&k2, 1), side(&k2, 1), side(&e2, 1), side(&k2, 1), 1).is_err());
    }

    #[test]
    fn two_edges_over_a_vertex_give_a_path() {
        let n0 = Structure::complete_graph(1);
        let table = amalgam_type_table(&n0, 1, 2).unwrap();
        let k2 = Structure::complete_graph(2);
        let t = rank_type(&k2, &[1], 1).unwrap();
        let cell = table.lookup(&t, &t).unwrap();
        let p3 = Structure::path_graph(3);
        // The base vertex is the middle of the path.
        assert_eq!(*cell, rank_type(&p3, &[2], 1).unwrap());
    }

    #[test]
    fn depth_zero_cells_are_the_base_diagram() {
        let n0 = Structure::complete_graph(2);
        let table = amalgam_type_table(&n0, 0, 3).unwrap();
        let base_type = rank_type(&n0, &[1, 2], 0).unwrap();
        assert!(table.cells.values().all(|t| *t == base_type));
        assert_eq!(table.sides, 1 + 4);
    }
}
