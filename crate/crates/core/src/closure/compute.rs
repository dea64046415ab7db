//! `cl^k` and `cl^{k,m}`.
//!
//! `cl^k(X, M)` is `X` together with every `B ⊆ M`, `|B| ≤ k`, such that
//! `(B ∩ X, B)` is algebraic under the catalog.
//!
//! The default strategy grows candidate sets by derivation steps. A step
//! places a declared pair `(A1, B1)` with `A1` inside `X ∪ W` and adds its
//! image to the current set `W`; every set reached this way is a valid `B`,
//! and every valid `B` is reached (replay its saturation). Steps either
//! touch `W`, found by pinning one pattern vertex onto `W`, or are disjoint
//! from it, in which case they are first steps from `∅` and are reused from
//! a cached list. A raw catalog only allows single first steps whose new
//! vertices avoid `X`.
//!
//! The sweep strategy tests every subset of size at most `k` directly and
//! serves as an oracle for small structures.

use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::catalog::{placements, ClosureCatalog, Witness};
use crate::error::{Error, Result};
use crate::structures::{Structure, Vertex, VertexSet};

/// Largest structure the sweep strategy accepts.
pub const SWEEP_BOUND: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureParams {
    pub k: usize,
    pub m: usize,
}

impl ClosureParams {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("closure witness size k must be at least 1"));
        }
        Ok(ClosureParams { k, m })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Derivation,
    Sweep,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derivation" => Ok(Strategy::Derivation),
            "sweep" => Ok(Strategy::Sweep),
            other => Err(Error::invalid(format!("unknown closure strategy {other:?}"))),
        }
    }
}

/// A closure together with, for each member, one witness set `B` of size
/// at most `k` containing it (`{v}` for members of `X`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub set: VertexSet,
    pub witness: BTreeMap<Vertex, VertexSet>,
}

fn validate(m: &Structure, x: &VertexSet, k: usize, cat: &ClosureCatalog) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("closure witness size k must be at least 1"));
    }
    if k > cat.k_max() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the catalog bound k_max = {}",
            cat.k_max()
        )));
    }
    if m.vocab() != cat.vocab() {
        return Err(Error::invalid("structure vocabulary differs from the catalog"));
    }
    if let Some(&v) = x.iter().find(|&&v| !m.contains(v)) {
        return Err(Error::invalid(format!("vertex {v} of X outside universe")));
    }
    Ok(())
}

pub fn cl_k(m: &Structure, x: &VertexSet, k: usize, cat: &ClosureCatalog) -> Result<VertexSet> {
    Ok(closure_with_witnesses(m, x, k, cat)?.set)
}

pub fn cl_k_with(
    m: &Structure,
    x: &VertexSet,
    k: usize,
    cat: &ClosureCatalog,
    strategy: Strategy,
) -> Result<VertexSet> {
    match strategy {
        Strategy::Derivation => cl_k(m, x, k, cat),
        Strategy::Sweep => sweep(m, x, k, cat),
    }
}

pub fn cl_km(m: &Structure, x: &VertexSet, params: ClosureParams, cat: &ClosureCatalog) -> Result<VertexSet> {
    validate(m, x, params.k, cat)?;
    let mut cur = x.clone();
    for _ in 0..params.m {
        let next = cl_k(m, &cur, params.k, cat)?;
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok(cur)
}

pub fn closure_with_witnesses(m: &Structure, x: &VertexSet, k: usize, cat: &ClosureCatalog) -> Result<Closure> {
    validate(m, x, k, cat)?;
    let mut witness: BTreeMap<Vertex, VertexSet> = x.iter().map(|&v| (v, VertexSet::from([v]))).collect();
    let usable: Vec<&Witness> = cat.witnesses().iter().filter(|w| w.pattern.n() <= k).collect();
    let xs: Vec<Vertex> = x.iter().copied().collect();

    let mut first: Vec<VertexSet> = Vec::new();
    for w in &usable {
        placements(m, w, &xs, None, |img| {
            let new_outside = img[w.a..].iter().all(|v| !x.contains(&v.unwrap()));
            if cat.is_normalized() || new_outside {
                first.push(img.iter().map(|v| v.unwrap()).collect());
            }
            ControlFlow::Continue(())
        });
    }
    let mut seen: HashSet<VertexSet> = HashSet::new();
    let mut stack: Vec<VertexSet> = Vec::new();
    for b in first.iter() {
        if seen.insert(b.clone()) {
            stack.push(b.clone());
        }
    }
    while let Some(w) = stack.pop() {
        for &v in &w {
            witness.entry(v).or_insert_with(|| w.clone());
        }
        if !cat.is_normalized() {
            continue;
        }
        let mut next: Vec<VertexSet> = Vec::new();
        for b in &first {
            if b.is_disjoint(&w) && w.len() + b.len() <= k {
                next.push(w.union(b).copied().collect());
            }
        }
        let pool: Vec<Vertex> = x.union(&w).copied().collect();
        for wt in &usable {
            for u in 1..=wt.pattern.n() as Vertex {
                for &z in &w {
                    placements(m, wt, &pool, Some((u, z)), |img| {
                        let mut grown = w.clone();
                        grown.extend(img.iter().map(|v| v.unwrap()));
                        if grown.len() <= k && grown.len() > w.len() {
                            next.push(grown);
                        }
                        ControlFlow::Continue(())
                    });
                }
            }
        }
        for b in next {
            if seen.insert(b.clone()) {
                stack.push(b);
            }
        }
    }
    Ok(Closure {
        set: witness.keys().copied().collect(),
        witness,
    })
}

/// `cl^k` by testing every subset of size at most `k`.
pub fn sweep(m: &Structure, x: &VertexSet, k: usize, cat: &ClosureCatalog) -> Result<VertexSet> {
    validate(m, x, k, cat)?;
    let n = m.n();
    if n > SWEEP_BOUND {
        return Err(Error::too_big("structure size for the sweep", n, SWEEP_BOUND));
    }
    let mut out = x.clone();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize > k {
            continue;
        }
        let b: VertexSet = (0..n as Vertex).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        if b.is_subset(&out) {
            continue;
        }
        let r = m.restrict(&b)?;
        let a = r.to_local(x);
        if a.len() < b.len() && cat.is_algebraic(&r.structure, &a)? {
            out.extend(b);
        }
    }
    Ok(out)
}
