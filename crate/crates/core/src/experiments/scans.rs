//! Scans of closure behaviour on samples: closure sizes, the closure of the
//! empty set, per-pair local relations, and the simply-good conditions for
//! a fixed configuration.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::{placements, Pair, Placement};
use crate::closure::{cl_k, cl_km, ClosureCatalog, ClosureParams};
use crate::embeddings::{enumerate_extensions, ExtensionQuery};
use crate::error::{Error, Result};
use crate::sampler::{sample, EdgeProfile, Seed};
use crate::structures::{canonical_form, free_amalgam_check, Structure, Vertex, VertexSet, DEFAULT_CANON_BOUND};

const BASE_TAG: u64 = 2;
const EMBED_TAG: u64 = 3;

/// Extensions examined per trial by [`simply_good_check`].
pub const EXTENSION_LIMIT: u64 = 1000;

/// Largest `B` accepted by [`local_relation_check`].
pub const LOCAL_RELATION_BOUND: usize = 8;

fn check_grid(ngrid: &[usize], trials: u64) -> Result<()> {
    if ngrid.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    Ok(())
}

fn check_catalog(profile: &EdgeProfile, cat: &ClosureCatalog) -> Result<()> {
    profile.validate()?;
    if cat.vocab() != &profile.vocabulary() {
        return Err(Error::invalid("catalog vocabulary differs from the profile's"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureSizeRow {
    pub n: usize,
    pub trials: u64,
    pub max_size: usize,
    pub mean_size: f64,
    /// Trials with `|cl| ≥ n^eps`.
    pub violations: u64,
    pub violation_fraction: f64,
}

/// Sizes of `cl^{k,m}(X)` for `X` a block of `l` consecutive vertices at a
/// uniform random start.
pub fn closure_size_scan(
    profile: &EdgeProfile,
    cat: &ClosureCatalog,
    params: ClosureParams,
    l: usize,
    eps: f64,
    ngrid: &[usize],
    trials: u64,
    seed: u64,
) -> Result<Vec<ClosureSizeRow>> {
    check_grid(ngrid, trials)?;
    check_catalog(profile, cat)?;
    let root = Seed::new(seed);
    ngrid
        .iter()
        .map(|&n| {
            if l > n {
                return Err(Error::invalid(format!("block of {l} vertices does not fit in n = {n}")));
            }
            let sizes: Vec<usize> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let s = root.trial(t);
                    let m = sample(profile, n, s)?;
                    let start = s.aux_rng(BASE_TAG, n).gen_range(1..=n - l + 1) as Vertex;
                    let x: VertexSet = (start..start + l as Vertex).collect();
                    Ok(cl_km(&m, &x, params, cat)?.len())
                })
                .collect::<Result<_>>()?;
            let bound = (n as f64).powf(eps);
            let violations = sizes.iter().filter(|&&s| s as f64 >= bound).count() as u64;
            Ok(ClosureSizeRow {
                n,
                trials,
                max_size: sizes.iter().copied().max().unwrap_or(0),
                mean_size: sizes.iter().sum::<usize>() as f64 / trials as f64,
                violations,
                violation_fraction: violations as f64 / trials as f64,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmptyClosureRow {
    pub n: usize,
    pub trials: u64,
    /// Empirical distribution of the isomorphism type of the induced
    /// substructure on `cl^{k,m}(∅)`, keyed by canonical code, or by
    /// `oversize:<size>` past the canonical-form bound.
    pub masses: BTreeMap<String, f64>,
}

pub fn empty_closure_scan(
    profile: &EdgeProfile,
    cat: &ClosureCatalog,
    params: ClosureParams,
    ngrid: &[usize],
    trials: u64,
    seed: u64,
) -> Result<Vec<EmptyClosureRow>> {
    check_grid(ngrid, trials)?;
    check_catalog(profile, cat)?;
    let root = Seed::new(seed);
    ngrid
        .iter()
        .map(|&n| {
            let keys: Vec<String> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let m = sample(profile, n, root.trial(t))?;
                    let cl = cl_km(&m, &VertexSet::new(), params, cat)?;
                    if cl.len() > DEFAULT_CANON_BOUND {
                        return Ok(format!("oversize:{}", cl.len()));
                    }
                    let r = m.restrict(&cl)?;
                    Ok(canonical_form(&r.structure, &[])?.code())
                })
                .collect::<Result<_>>()?;
            let mut counts: BTreeMap<String, u64> = BTreeMap::new();
            for k in keys {
                *counts.entry(k).or_insert(0) += 1;
            }
            let masses = counts.into_iter().map(|(k, c)| (k, c as f64 / trials as f64)).collect();
            Ok(EmptyClosureRow { n, trials, masses })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalRelationReport {
    /// No `X ⊆ B` with `|X| ≤ m` has `C`, `A ∩ X ⊊ C ⊆ X`, algebraic over
    /// `A ∩ X`.
    pub s_m: bool,
    /// Every `X ⊆ B` with `|X| ≤ k` lies in some `Y ⊆ B`, `|Y| ≤ m`, with
    /// `B|Y` algebraic over `A ∩ Y`.
    pub i_km: bool,
    /// Sets refuting `s_m` (as `X, C`) or `i_km` (as `X`).
    pub witnesses: Vec<String>,
}

fn subsets(base: &[Vertex], max: usize) -> Vec<VertexSet> {
    (0u32..1 << base.len())
        .filter(|mask| mask.count_ones() as usize <= max)
        .map(|mask| {
            base.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

fn show(set: &VertexSet) -> String {
    let items: Vec<String> = set.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn algebraic_inside(cat: &ClosureCatalog, b: &Structure, base: &VertexSet, over: &VertexSet) -> Result<bool> {
    let r = b.restrict(over)?;
    cat.is_algebraic(&r.structure, &r.to_local(base))
}

/// The local relations `s_m` and `i_{k,m}` of `A ⊆ B` under `cat`, by
/// exhaustive subset search.
pub fn local_relation_check(
    b: &Structure,
    a: &VertexSet,
    m: usize,
    k: usize,
    cat: &ClosureCatalog,
) -> Result<LocalRelationReport> {
    if b.n() > LOCAL_RELATION_BOUND {
        return Err(Error::too_big("structure size for local relations", b.n(), LOCAL_RELATION_BOUND));
    }
    if let Some(&v) = a.iter().find(|&&v| !b.contains(v)) {
        return Err(Error::invalid(format!("vertex {v} of A is not in B")));
    }
    let all: Vec<Vertex> = b.vertices().collect();
    let mut witnesses = Vec::new();

    let mut s_m = true;
    'outer: for x in subsets(&all, m) {
        let ax: VertexSet = a.intersection(&x).copied().collect();
        let rest: Vec<Vertex> = x.difference(&ax).copied().collect();
        for extra in subsets(&rest, rest.len()) {
            if extra.is_empty() {
                continue;
            }
            let c: VertexSet = ax.union(&extra).copied().collect();
            if algebraic_inside(cat, b, &ax, &c)? {
                s_m = false;
                witnesses.push(format!("s_m: X={} C={}", show(&x), show(&c)));
                break 'outer;
            }
        }
    }

    let mut i_km = true;
    let candidates = subsets(&all, m);
    for x in subsets(&all, k) {
        let mut found = false;
        for y in candidates.iter().filter(|y| x.is_subset(y)) {
            let ay: VertexSet = a.intersection(y).copied().collect();
            if algebraic_inside(cat, b, &ay, y)? {
                found = true;
                break;
            }
        }
        if !found {
            i_km = false;
            witnesses.push(format!("i_km: X={}", show(&x)));
            break;
        }
    }
    Ok(LocalRelationReport { s_m, i_km, witnesses })
}

/// Configuration for [`simply_good_check`]: `B0 ⊆ B1` and `B` inside `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GoodConfig {
    pub n_struct: Structure,
    pub b: VertexSet,
    pub b0: VertexSet,
    pub b1: VertexSet,
}

impl GoodConfig {
    pub fn new(n_struct: Structure, b: VertexSet, b0: VertexSet, b1: VertexSet) -> Result<Self> {
        for set in [&b, &b0, &b1] {
            if let Some(&v) = set.iter().find(|&&v| !n_struct.contains(v)) {
                return Err(Error::invalid(format!("vertex {v} outside N")));
            }
        }
        if !b0.is_subset(&b1) {
            return Err(Error::invalid("B0 must be contained in B1"));
        }
        Ok(GoodConfig { n_struct, b, b0, b1 })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodReport {
    pub n: usize,
    pub trials: u64,
    /// Trials where a copy of `N|B` was placed.
    pub placed: u64,
    /// Placed trials with an extension meeting all three conditions.
    pub passed: u64,
    pub pass_fraction: f64,
    pub extensions_checked: u64,
    /// Placed trials that hit [`EXTENSION_LIMIT`].
    pub truncated: u64,
    /// First failure per condition among trials without a good extension,
    /// plus the first trial with no extension at all.
    pub witnesses: Vec<String>,
}

/// Fraction of trials in which a random placement `f` of `N|B` in `M_n`
/// has an extension `g` to `N` with
/// (i) `g(N) ∩ cl^k(f(B)) = f(B)`;
/// (ii) `g(N)` and `cl^k(f(B))` are freely amalgamated over `f(B)`;
/// (iii) `cl^k(g(B0)) ⊆ g(B1) ∪ cl^k(f(B))`.
pub fn simply_good_check(
    cfg: &GoodConfig,
    k: usize,
    cat: &ClosureCatalog,
    profile: &EdgeProfile,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<GoodReport> {
    check_grid(&[n], trials)?;
    check_catalog(profile, cat)?;
    let pair = Pair::new(cfg.n_struct.clone(), cfg.b.clone())?;
    let root = Seed::new(seed);
    let outcomes: Vec<Option<(bool, u64, bool, Vec<String>)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = root.trial(t);
            let m = sample(profile, n, s)?;
            let mut rng = s.aux_rng(EMBED_TAG, n);
            let Some(f) = placements(&pair, &m, Placement::Random { count: 1 }, &mut rng).pop() else {
                return Ok(None);
            };
            let fb = f.range();
            let cl_b = cl_k(&m, &fb, k, cat)?;
            let ext = enumerate_extensions(&ExtensionQuery::new(&m, &cfg.n_struct, f).with_limit(EXTENSION_LIMIT))?;
            let mut ok = false;
            let mut examined = 0u64;
            let mut notes = Vec::new();
            for g in &ext.maps {
                examined += 1;
                let gn = g.range();
                let meet: VertexSet = gn.intersection(&cl_b).copied().collect();
                let mut failed = Vec::new();
                if meet != fb {
                    failed.push("(i)");
                }
                if !free_amalgam_check(&m, &fb, &gn, &cl_b)? {
                    failed.push("(ii)");
                }
                let cl0 = cl_k(&m, &g.image_of(&cfg.b0), k, cat)?;
                let g1 = g.image_of(&cfg.b1);
                if !cl0.iter().all(|v| g1.contains(v) || cl_b.contains(v)) {
                    failed.push("(iii)");
                }
                if failed.is_empty() {
                    ok = true;
                    break;
                }
                for what in failed {
                    notes.push(format!("{t}: {what} fails for g(N)={}", show(&gn)));
                }
            }
            if ext.maps.is_empty() {
                notes.push(format!("{t}: no extension of f(B)={} to N", show(&fb)));
            }
            if ok {
                notes.clear();
            }
            Ok(Some((ok, examined, ext.truncated, notes)))
        })
        .collect::<Result<_>>()?;
    let mut report = GoodReport {
        n,
        trials,
        placed: 0,
        passed: 0,
        pass_fraction: 0.0,
        extensions_checked: 0,
        truncated: 0,
        witnesses: Vec::new(),
    };
    let mut seen = [false; 4];
    for (ok, count, truncated, notes) in outcomes.into_iter().flatten() {
        report.placed += 1;
        report.passed += ok as u64;
        report.extensions_checked += count;
        report.truncated += truncated as u64;
        for note in notes {
            let idx = ["(i)", "(ii)", "(iii)"]
                .iter()
                .position(|c| note.contains(&format!(" {c} ")))
                .unwrap_or(3);
            if !seen[idx] {
                seen[idx] = true;
                report.witnesses.push(note);
            }
        }
    }
    if report.placed > 0 {
        report.pass_fraction = report.passed as f64 / report.placed as f64;
    }
    Ok(report)
}
