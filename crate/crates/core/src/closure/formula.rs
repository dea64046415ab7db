//! First-order definition of `y ∈ cl^k({x0, ..., x(l-1)}, M)`.
//!
//! `y` is in the closure iff it is a parameter, or some algebraic pair
//! `(A, B)` with `|B| ≤ k` is realized with `A` on parameters, the rest of
//! `B` off the parameters, and `y` among the rest. The formula is the
//! disjunction, over representatives and injective placements of `A`, of
//! the existentially quantified atomic diagram of `B`.

use std::collections::BTreeSet;

use super::catalog::{realizable_structures, ClosureCatalog};
use crate::error::Result;
use crate::logic::Formula;
use crate::structures::{pair_type, PairType, Structure, Vertex, VertexSet};

/// Representatives `(B, |A|)` (with `A = {1..|A|}`) of every non-reflexive
/// pair type with `|B| ≤ k` that the catalog makes algebraic. Raw catalogs
/// list their usable declarations; normalized catalogs are enumerated over
/// all realizable structures, so `k` is limited by the enumeration bound.
pub fn algebraic_types(cat: &ClosureCatalog, k: usize) -> Result<Vec<(PairType, Structure, usize)>> {
    let mut out = Vec::new();
    if !cat.is_normalized() {
        for w in cat.witnesses() {
            if w.pattern.n() <= k {
                let a: VertexSet = (1..=w.a as Vertex).collect();
                out.push((pair_type(&w.pattern, &a)?, w.pattern.clone(), w.a));
            }
        }
        return Ok(out);
    }
    let mut seen = BTreeSet::new();
    for s in 1..=k {
        for b in realizable_structures(s, cat.vocab())? {
            for mask in 0u32..(1 << s) - 1 {
                let a: VertexSet = (0..s as Vertex).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
                if !cat.is_algebraic(&b, &a)? {
                    continue;
                }
                let t = pair_type(&b, &a)?;
                if seen.insert(t.clone()) {
                    let (rep, a) = t.decode(cat.vocab())?;
                    out.push((t, rep, a.len()));
                }
            }
        }
    }
    Ok(out)
}

fn param(i: usize) -> String {
    format!("x{i}")
}

/// Atomic diagram of `b` with vertex `v` named `names[v - 1]`.
fn diagram(b: &Structure, names: &[String]) -> Formula {
    let mut parts = Vec::new();
    let n = b.n();
    for i in 0..n {
        for j in (i + 1)..n {
            parts.push(Formula::not(Formula::eq(&names[i], &names[j])));
        }
    }
    for (s, sym) in b.vocab().symbols().iter().enumerate() {
        let total = n.pow(sym.arity as u32);
        let mut tuple = vec![0 as Vertex; sym.arity];
        for code in 0..total {
            let mut c = code;
            for t in tuple.iter_mut().rev() {
                *t = (c % n) as Vertex + 1;
                c /= n;
            }
            let repeated = tuple.iter().collect::<BTreeSet<_>>().len() < tuple.len();
            if sym.irreflexive && repeated {
                continue;
            }
            if sym.symmetric && tuple[0] > tuple[1] {
                continue;
            }
            let args: Vec<&str> = tuple.iter().map(|&v| names[v as usize - 1].as_str()).collect();
            let atom = Formula::atom(&sym.name, &args);
            parts.push(if b.holds(s, &tuple) { atom } else { Formula::not(atom) });
        }
    }
    Formula::and_all(parts)
}

// Injective maps [a] -> [l], in lexicographic order.
fn injections(a: usize, l: usize) -> Vec<Vec<usize>> {
    fn go(a: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == a {
            out.push(cur.clone());
            return;
        }
        for i in 0..l {
            if !cur.contains(&i) {
                cur.push(i);
                go(a, l, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(a, l, &mut Vec::new(), &mut out);
    out
}

/// `ψ(y, x0, ..., x(l-1))` with `M ⊨ ψ[b, ā]` iff `b ∈ cl^k(ā, M)`.
pub fn closure_defining_formula(cat: &ClosureCatalog, k: usize, l: usize) -> Result<Formula> {
    let mut disjuncts: Vec<Formula> = (0..l).map(|i| Formula::eq("y", &param(i))).collect();
    for (_, b, a) in algebraic_types(cat, k)? {
        let fresh: Vec<String> = (0..b.n() - a).map(|i| format!("z{i}")).collect();
        for sigma in injections(a, l) {
            let mut names: Vec<String> = sigma.iter().map(|&i| param(i)).collect();
            names.extend(fresh.iter().cloned());
            let mut parts = vec![diagram(&b, &names)];
            for z in &fresh {
                for i in 0..l {
                    parts.push(Formula::not(Formula::eq(z, &param(i))));
                }
            }
            parts.push(Formula::or_all(fresh.iter().map(|z| Formula::eq("y", z))));
            let mut body = Formula::and_all(parts);
            for z in fresh.iter().rev() {
                body = Formula::exists(z, body);
            }
            disjuncts.push(body);
        }
    }
    Ok(Formula::or_all(disjuncts))
}
