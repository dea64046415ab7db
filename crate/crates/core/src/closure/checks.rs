//! Checkers for the closure axioms, the `cl^{k,m} ⊆ cl^{k^m}` containment,
//! locality, transparency and smoothness. Each recomputes closures
//! directly and reports a witness on failure.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::catalog::{realizable_structures, ClosureCatalog};
use super::compute::{cl_k, cl_km, closure_with_witnesses, ClosureParams};
use crate::error::{Error, Result};
use crate::structures::{free_amalgam_check, PairType, Structure, Vertex, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b(i)")]
    BI,
    #[serde(rename = "b(ii)")]
    BII,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "d")]
    D,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::A => "a",
            Clause::BI => "b(i)",
            Clause::BII => "b(ii)",
            Clause::C => "c",
            Clause::D => "d",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseResult {
    pub clause: Clause,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub clauses: Vec<ClauseResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn clause(&self, c: Clause) -> Option<&ClauseResult> {
        self.clauses.iter().find(|r| r.clause == c)
    }
}

fn fmt_set(s: &VertexSet) -> String {
    let items: Vec<String> = s.iter().map(u32::to_string).collect();
    format!("{{{}}}", items.join(","))
}

/// `cl^k(X, M|N)` in the labels of `M`.
fn cl_in(m: &Structure, n: &VertexSet, x: &VertexSet, k: usize, cat: &ClosureCatalog) -> Result<VertexSet> {
    let r = m.restrict(n)?;
    Ok(r.to_original(&cl_k(&r.structure, &r.to_local(x), k, cat)?))
}

/// Check clauses (a) to (d) on one instance. Requires `X ⊆ Y ⊆ M` and
/// `k ≤ l ≤ k_max`. Clause (b)(i) is tested with `N = cl^k(X)` and
/// `N = cl^k(X) ∪ Y`; (b)(ii) with `N = X` and `N = Y`; (d) with the
/// reversal and a rotation of the labels.
pub fn check_axioms(
    cat: &ClosureCatalog,
    m: &Structure,
    x: &VertexSet,
    y: &VertexSet,
    k: usize,
    l: usize,
) -> Result<AxiomReport> {
    if !x.is_subset(y) {
        return Err(Error::invalid("X must be a subset of Y"));
    }
    if k > l {
        return Err(Error::invalid("k must not exceed l"));
    }
    let cx = cl_k(m, x, k, cat)?;
    let cy = cl_k(m, y, k, cat)?;
    let all: VertexSet = m.vertices().collect();
    let mut clauses = Vec::new();
    let mut push = |clause, failure: Option<String>| {
        clauses.push(ClauseResult {
            clause,
            passed: failure.is_none(),
            witness: failure,
        })
    };

    let a = if !x.is_subset(&cx) {
        Some(format!("X = {} not inside cl(X) = {}", fmt_set(x), fmt_set(&cx)))
    } else if !cx.is_subset(&all) {
        Some(format!("cl(X) = {} leaves the universe", fmt_set(&cx)))
    } else if !cx.is_subset(&cy) {
        Some(format!(
            "X = {} ⊆ Y = {} but cl(X) = {} ⊄ cl(Y) = {}",
            fmt_set(x),
            fmt_set(y),
            fmt_set(&cx),
            fmt_set(&cy)
        ))
    } else {
        None
    };
    push(Clause::A, a);

    let mut bi = None;
    for n in [cx.clone(), cx.union(y).copied().collect::<VertexSet>()] {
        let cn = cl_in(m, &n, x, k, cat)?;
        if cn != cx {
            bi = Some(format!("N = {}: cl(X, N) = {} but cl(X, M) = {}", fmt_set(&n), fmt_set(&cn), fmt_set(&cx)));
            break;
        }
    }
    push(Clause::BI, bi);

    let mut bii = None;
    for n in [x, y] {
        let cn = cl_in(m, n, x, k, cat)?;
        if !cn.is_subset(&cx) {
            bii = Some(format!("N = {}: cl(X, N) = {} ⊄ cl(X, M) = {}", fmt_set(n), fmt_set(&cn), fmt_set(&cx)));
            break;
        }
    }
    push(Clause::BII, bii);

    let cl_l = cl_k(m, x, l, cat)?;
    let c = (!cx.is_subset(&cl_l)).then(|| {
        format!("cl^{k}(X) = {} ⊄ cl^{l}(X) = {}", fmt_set(&cx), fmt_set(&cl_l))
    });
    push(Clause::C, c);

    let n = m.n() as Vertex;
    let perms: [Vec<Vertex>; 2] = [
        (1..=n).map(|v| n + 1 - v).collect(),
        (1..=n).map(|v| v % n.max(1) + 1).collect(),
    ];
    let mut d = None;
    for perm in &perms {
        let image = |s: &VertexSet| -> VertexSet { s.iter().map(|&v| perm[v as usize - 1]).collect() };
        let pm = m.relabel(perm)?;
        let cp = cl_k(&pm, &image(x), k, cat)?;
        if cp != image(&cx) {
            d = Some(format!("relabelling {perm:?}: cl = {} but image of cl = {}", fmt_set(&cp), fmt_set(&image(&cx))));
            break;
        }
    }
    push(Clause::D, d);
    Ok(AxiomReport { clauses })
}

/// `cl^{k,m}(X, M) ⊆ cl^{k^m}(X, M)`. Needs `k^m ≤ k_max`.
pub fn check_containment(
    m: &Structure,
    x: &VertexSet,
    k: usize,
    rounds: usize,
    cat: &ClosureCatalog,
) -> Result<bool> {
    let kstar = (k as u64)
        .checked_pow(rounds as u32)
        .filter(|&v| v <= cat.k_max() as u64)
        .ok_or_else(|| Error::too_big("k^m", k.saturating_pow(rounds as u32), cat.k_max()))?
        as usize;
    let lhs = cl_km(m, x, ClosureParams::new(k, rounds)?, cat)?;
    let rhs = cl_k(m, x, kstar, cat)?;
    Ok(lhs.is_subset(&rhs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReport {
    pub passed: bool,
    /// For each member `z` of the closure, a set `Y ∋ z` with
    /// `|Y| ≤ k` and `cl^k(Y ∩ X, M|Y) = Y`, if one was found.
    pub witnesses: BTreeMap<Vertex, Option<VertexSet>>,
}

fn is_local_witness(m: &Structure, x: &VertexSet, yset: &VertexSet, k: usize, cat: &ClosureCatalog) -> Result<bool> {
    let base: VertexSet = yset.intersection(x).copied().collect();
    Ok(yset.len() <= k && cl_in(m, yset, &base, k, cat)? == *yset)
}

/// Exhaustive fallback search for a local witness is limited to closures
/// of this size.
pub const LOCAL_SEARCH_BOUND: usize = 16;

/// `(1, k)`-locality of `cl^k` at `X`: every member of `cl^k(X, M)` lies in
/// some `Y` of size at most `k` that is its own closure from `Y ∩ X`.
pub fn check_local(cat: &ClosureCatalog, k: usize, m: &Structure, x: &VertexSet) -> Result<LocalReport> {
    let c = closure_with_witnesses(m, x, k, cat)?;
    let mut witnesses = BTreeMap::new();
    for (&z, cand) in &c.witness {
        let found = if is_local_witness(m, x, cand, k, cat)? {
            Some(cand.clone())
        } else if c.set.len() <= LOCAL_SEARCH_BOUND {
            search_local(m, x, &c.set, z, k, cat)?
        } else {
            None
        };
        witnesses.insert(z, found);
    }
    Ok(LocalReport {
        passed: witnesses.values().all(Option::is_some),
        witnesses,
    })
}

fn search_local(
    m: &Structure,
    x: &VertexSet,
    within: &VertexSet,
    z: Vertex,
    k: usize,
    cat: &ClosureCatalog,
) -> Result<Option<VertexSet>> {
    let others: Vec<Vertex> = within.iter().copied().filter(|&v| v != z).collect();
    for mask in 0u32..(1 << others.len()) {
        if mask.count_ones() as usize + 1 > k {
            continue;
        }
        let mut y: VertexSet = (0..others.len()).filter(|i| mask >> i & 1 == 1).map(|i| others[i]).collect();
        y.insert(z);
        if is_local_witness(m, x, &y, k, cat)? {
            return Ok(Some(y));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransparencyReport {
    pub passed: bool,
    pub checked: usize,
    pub failures: Vec<PairType>,
}

/// `k`-transparency: every declared algebraic `(A, B)` with `|B| ≤ k`
/// satisfies `cl^k(A, B) = B`. A declaration that cannot be decoded, or
/// whose code is not canonical and is not covered by another witness,
/// fails.
pub fn check_transparent(cat: &ClosureCatalog, k: usize) -> Result<TransparencyReport> {
    if k > cat.k_max() {
        return Err(Error::invalid(format!("k = {k} exceeds k_max = {}", cat.k_max())));
    }
    let mut failures = Vec::new();
    let mut checked = 0;
    for e in cat.entries() {
        if e.flag != super::Flag::Algebraic || e.b_size > k {
            continue;
        }
        checked += 1;
        let ok = match e.pair.decode(cat.vocab()) {
            Ok((b, a)) => cl_k(&b, &a, k, cat)?.len() == b.n(),
            Err(_) => false,
        };
        if !ok {
            failures.push(e.pair.clone());
        }
    }
    Ok(TransparencyReport {
        passed: failures.is_empty(),
        checked,
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothCounterexample {
    pub structure: Structure,
    pub a: VertexSet,
    pub b: VertexSet,
    pub c: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothReport {
    pub passed: bool,
    pub checked: usize,
    pub counterexample: Option<SmoothCounterexample>,
}

/// Smoothness relative to the catalog, on every realizable `N` with at most
/// `max_size` vertices: whenever `B` and `C` are freely amalgamated over
/// `A = B ∩ C` with `N = B ∪ C` and `C ≠ A`, `(B, N)` is algebraic iff
/// `(A, C)` is.
pub fn check_smooth(cat: &ClosureCatalog, max_size: usize) -> Result<SmoothReport> {
    let mut checked = 0;
    for s in 1..=max_size {
        for n in realizable_structures(s, cat.vocab())? {
            // Each vertex goes to A (0), B only (1) or C only (2).
            for code in 0..3usize.pow(s as u32) {
                let mut sets = [VertexSet::new(), VertexSet::new(), VertexSet::new()];
                let mut c = code;
                for v in 1..=s as Vertex {
                    sets[c % 3].insert(v);
                    c /= 3;
                }
                if sets[2].is_empty() {
                    continue;
                }
                let [a, b_only, c_only] = sets;
                let b: VertexSet = a.union(&b_only).copied().collect();
                let cset: VertexSet = a.union(&c_only).copied().collect();
                if !free_amalgam_check(&n, &a, &b, &cset)? {
                    continue;
                }
                checked += 1;
                let left = cat.is_algebraic(&n, &b)?;
                let rc = n.restrict(&cset)?;
                let right = cat.is_algebraic(&rc.structure, &rc.to_local(&a))?;
                if left != right {
                    return Ok(SmoothReport {
                        passed: false,
                        checked,
                        counterexample: Some(SmoothCounterexample { structure: n, a, b, c: cset }),
                    });
                }
            }
        }
    }
    Ok(SmoothReport {
        passed: true,
        checked,
        counterexample: None,
    })
}
