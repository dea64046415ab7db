//! Rank-`d` types: the invariant that decides agreement on all formulas of
//! quantifier depth at most `d` with the given parameters.
//!
//! The rank-0 type is the atomic diagram of the parameter tuple (equalities
//! and every relation over parameter positions). The rank-`d+1` type is the
//! set of rank-`d` types of all one-point extensions of the tuple.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::structures::{Structure, Vertex};

pub const MAX_TYPE_DEPTH: usize = 4;
pub const MAX_TYPE_SIZE: usize = 12;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    Atomic(Vec<u8>),
    Set(Vec<Node>),
}

/// Canonical rank-`d` type of `(M, ā)`. Equality is structural; sets are
/// stored sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RankType {
    depth: usize,
    params: usize,
    node: Node,
}

impl RankType {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn params(&self) -> usize {
        self.params
    }

    /// Number of one-point extension types (0 for a rank-0 type).
    pub fn width(&self) -> usize {
        match &self.node {
            Node::Atomic(_) => 0,
            Node::Set(s) => s.len(),
        }
    }
}

impl PartialOrd for RankType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RankType {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.depth, self.params, &self.node).cmp(&(other.depth, other.params, &other.node))
    }
}

impl fmt::Debug for RankType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match n {
                Node::Atomic(bits) => {
                    let s: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
                    write!(f, "[{s}]")
                }
                Node::Set(items) => {
                    write!(f, "{{")?;
                    for (i, c) in items.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        go(c, f)?;
                    }
                    write!(f, "}}")
                }
            }
        }
        write!(f, "RankType(d={}, k={}, ", self.depth, self.params)?;
        go(&self.node, f)?;
        write!(f, ")")
    }
}

/// Rank-`d` type of `(m, params)`; `d ≤ 4` and `|m| ≤ 12`.
pub fn rank_type(m: &Structure, params: &[Vertex], d: usize) -> Result<RankType> {
    if d > MAX_TYPE_DEPTH {
        return Err(Error::too_big("type depth", d, MAX_TYPE_DEPTH));
    }
    if m.n() > MAX_TYPE_SIZE {
        return Err(Error::too_big("structure size for types", m.n(), MAX_TYPE_SIZE));
    }
    if let Some(&v) = params.iter().find(|&&v| !m.contains(v)) {
        return Err(Error::invalid(format!("parameter {v} outside universe")));
    }
    let mut tuple = params.to_vec();
    Ok(RankType {
        depth: d,
        params: params.len(),
        node: node(m, &mut tuple, d),
    })
}

fn node(m: &Structure, tuple: &mut Vec<Vertex>, d: usize) -> Node {
    if d == 0 {
        return Node::Atomic(atomic(m, tuple));
    }
    let mut set: Vec<Node> = Vec::with_capacity(m.n());
    for x in m.vertices() {
        tuple.push(x);
        set.push(node(m, tuple, d - 1));
        tuple.pop();
    }
    set.sort_unstable();
    set.dedup();
    Node::Set(set)
}

fn atomic(m: &Structure, t: &[Vertex]) -> Vec<u8> {
    let k = t.len();
    let mut bits = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            bits.push((t[i] == t[j]) as u8);
        }
    }
    for s in 0..m.vocab().len() {
        let arity = m.vocab().symbols()[s].arity;
        let total = k.pow(arity as u32);
        let mut args = vec![0 as Vertex; arity];
        for code in 0..total {
            let mut c = code;
            for a in args.iter_mut().rev() {
                *a = t[c % k];
                c /= k;
            }
            bits.push(m.holds(s, &args) as u8);
        }
    }
    bits
}

/// Whether `(m1, a1)` and `(m2, a2)` agree on every formula of quantifier
/// depth at most `d`.
pub fn equiv_d(m1: &Structure, a1: &[Vertex], m2: &Structure, a2: &[Vertex], d: usize) -> Result<bool> {
    if m1.vocab() != m2.vocab() {
        return Err(Error::invalid("structures use different vocabularies"));
    }
    if a1.len() != a2.len() {
        return Ok(false);
    }
    Ok(rank_type(m1, a1, d)? == rank_type(m2, a2, d)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_endpoints_agree() {
        let k2 = Structure::complete_graph(2);
        assert_eq!(rank_type(&k2, &[1], 0).unwrap(), rank_type(&k2, &[2], 0).unwrap());
        assert!(equiv_d(&k2, &[1], &k2, &[2], 3).unwrap());
    }

    #[test]
    fn cliques() {
        let k3 = Structure::complete_graph(3);
        let k4 = Structure::complete_graph(4);
        assert!(equiv_d(&k3, &[], &k4, &[], 3).unwrap());
        assert!(!equiv_d(&k3, &[], &k4, &[], 4).unwrap());
    }

    #[test]
    fn edge_versus_two_points() {
        let k2 = Structure::complete_graph(2);
        let e2 = Structure::graph(2, &[]).unwrap();
        assert!(equiv_d(&k2, &[], &e2, &[], 1).unwrap());
        assert!(!equiv_d(&k2, &[], &e2, &[], 2).unwrap());
        // With one parameter, depth 1 already sees the edge.
        assert!(!equiv_d(&k2, &[1], &e2, &[1], 1).unwrap());
    }

    #[test]
    fn empty_structure() {
        let e = Structure::graph(0, &[]).unwrap();
        let k1 = Structure::complete_graph(1);
        assert!(equiv_d(&e, &[], &k1, &[], 0).unwrap());
        assert!(!equiv_d(&e, &[], &k1, &[], 1).unwrap());
    }

    #[test]
    fn bounds() {
        let big = Structure::graph(13, &[]).unwrap();
        assert!(rank_type(&big, &[], 1).is_err());
        assert!(rank_type(&Structure::complete_graph(2), &[], 5).is_err());
        assert!(rank_type(&Structure::complete_graph(2), &[3], 1).is_err());
    }
}
