//! Edge-probability profiles, reproducible sampling, and closed-form
//! probabilities for aligned interval embeddings.
//!
//! Sampling walks each diagonal `{(i, i + d)}` with its own ChaCha stream
//! keyed by `(seed, trial, n, d)`. Sparse diagonals are traversed by
//! geometric skips, dense ones by one Bernoulli draw per pair. The draw
//! sequence depends only on the key and `p_d`, so a sample is a pure
//! function of `(profile, n, seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{
    successor_relation, symmetric_relation, Structure, Vertex, Vocabulary,
};

/// Edge probabilities of the random model as a function of distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum EdgeProfile {
    /// `p_d = d^-α` for `d > 1`, and `p_1 = p_2 = 2^-α`.
    #[serde(rename = "caseA")]
    CaseA { alpha: f64 },
    /// `p_d = d^-α` for all `d ≥ 1`, with the successor relation added.
    #[serde(rename = "caseB")]
    CaseB { alpha: f64 },
    /// `p_{i,j} = n^-α + 2^-|i-j|`, clamped to 1.
    #[serde(rename = "second")]
    SecondContext { alpha: f64 },
    /// `probs[d - 1] = p_d`; distances past the end have probability 0.
    #[serde(rename = "custom")]
    Custom { probs: Vec<f64> },
    /// `p'_j = probs[k]` when `j = indices[k]`, else 0.
    #[serde(rename = "sparsified")]
    Sparsified { probs: Vec<f64>, indices: Vec<usize> },
}

impl EdgeProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            EdgeProfile::CaseA { alpha }
            | EdgeProfile::CaseB { alpha }
            | EdgeProfile::SecondContext { alpha } => {
                if !(alpha.is_finite() && *alpha > 0.0 && *alpha < 1.0) {
                    return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
                }
            }
            EdgeProfile::Custom { probs } => check_probs(probs)?,
            EdgeProfile::Sparsified { probs, indices } => {
                check_probs(probs)?;
                if probs.len() != indices.len() {
                    return Err(Error::invalid("sparsified profile needs one index per probability"));
                }
                if indices.first() == Some(&0) || indices.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::invalid(
                        "sparsified indices must be positive and strictly increasing",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            EdgeProfile::CaseA { alpha }
            | EdgeProfile::CaseB { alpha }
            | EdgeProfile::SecondContext { alpha } => Some(*alpha),
            _ => None,
        }
    }

    pub fn has_successor(&self) -> bool {
        matches!(self, EdgeProfile::CaseB { .. })
    }

    pub fn vocabulary(&self) -> Vocabulary {
        if self.has_successor() {
            Vocabulary::graph_with_successor()
        } else {
            Vocabulary::graph()
        }
    }

    /// Whether `p_d` does not depend on `n`.
    pub fn is_stationary(&self) -> bool {
        !matches!(self, EdgeProfile::SecondContext { .. })
    }

    /// `p_d` in a structure of size `n`, for `d ≥ 1`.
    pub fn prob_at(&self, d: usize, n: usize) -> f64 {
        debug_assert!(d >= 1);
        match self {
            EdgeProfile::CaseA { alpha } => {
                if d <= 2 {
                    2f64.powf(-alpha)
                } else {
                    (d as f64).powf(-alpha)
                }
            }
            EdgeProfile::CaseB { alpha } => (d as f64).powf(-alpha),
            EdgeProfile::SecondContext { alpha } => {
                let p = (n as f64).powf(-alpha) + 2f64.powi(-(d.min(1100) as i32));
                p.min(1.0)
            }
            EdgeProfile::Custom { probs } => probs.get(d - 1).copied().unwrap_or(0.0),
            EdgeProfile::Sparsified { probs, indices } => match indices.binary_search(&d) {
                Ok(k) => probs[k],
                Err(_) => 0.0,
            },
        }
    }

    /// Short human-readable label, e.g. `caseA(alpha=0.5)`.
    pub fn label(&self) -> String {
        match self {
            EdgeProfile::CaseA { alpha } => format!("caseA(alpha={alpha})"),
            EdgeProfile::CaseB { alpha } => format!("caseB(alpha={alpha})"),
            EdgeProfile::SecondContext { alpha } => format!("second(alpha={alpha})"),
            EdgeProfile::Custom { probs } => format!("custom(len={})", probs.len()),
            EdgeProfile::Sparsified { indices, .. } => format!("sparsified(len={})", indices.len()),
        }
    }
}

fn check_probs(probs: &[f64]) -> Result<()> {
    match probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        Some(p) => Err(Error::invalid(format!("probability {p} outside [0, 1]"))),
        None => Ok(()),
    }
}

/// Probability of the edge `{i, j}` in a structure of size `n`; 0 when
/// `i = j`.
pub fn edge_probability(profile: &EdgeProfile, n: usize, i: Vertex, j: Vertex) -> Result<f64> {
    for v in [i, j] {
        if v == 0 || v as usize > n {
            return Err(Error::invalid(format!("vertex {v} outside [1, {n}]")));
        }
    }
    if i == j {
        return Ok(0.0);
    }
    Ok(profile.prob_at(i.abs_diff(j) as usize, n))
}

/// Root seed plus the trial index of the stream it drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub value: u64,
    pub trial: u64,
}

impl Seed {
    pub fn new(value: u64) -> Self {
        Seed { value, trial: 0 }
    }

    pub fn trial(self, trial: u64) -> Self {
        Seed { trial, ..self }
    }

    /// Independent ChaCha stream for an auxiliary purpose (placements,
    /// shuffles), keyed by `tag` and `n` so it never aliases a diagonal.
    pub fn aux_rng(self, tag: u64, n: usize) -> ChaCha8Rng {
        stream(self.value, self.trial, n as u64, u64::MAX - tag)
    }
}

fn stream(a: u64, b: u64, c: u64, d: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip([a, b, c, d]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

// Below this probability a diagonal is walked with geometric skips.
const SKIP_THRESHOLD: f64 = 0.25;

/// Draw `M_n` under `profile`. Deterministic in `(profile, n, seed)`.
pub fn sample(profile: &EdgeProfile, n: usize, seed: Seed) -> Result<Structure> {
    profile.validate()?;
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for d in 1..n {
        let p = profile.prob_at(d, n);
        if p <= 0.0 {
            continue;
        }
        let pairs = n - d;
        let mut push = |i: usize| {
            adj[i].push((i + d) as Vertex + 1);
            adj[i + d].push(i as Vertex + 1);
        };
        if p >= 1.0 {
            (0..pairs).for_each(&mut push);
            continue;
        }
        let mut rng = stream(seed.value, seed.trial, n as u64, d as u64);
        if p >= SKIP_THRESHOLD {
            for i in 0..pairs {
                if rng.gen::<f64>() < p {
                    push(i);
                }
            }
        } else {
            let log_q = (-p).ln_1p();
            let mut i = 0usize;
            loop {
                let u: f64 = rng.gen();
                // Failures before the next success: floor(ln(1-u) / ln(1-p)).
                let skip = ((-u).ln_1p() / log_q).floor();
                if !(skip < (pairs - i) as f64) {
                    break;
                }
                i += skip as usize;
                push(i);
                i += 1;
                if i >= pairs {
                    break;
                }
            }
        }
    }
    adj.iter_mut().for_each(|l| l.sort_unstable());
    let vocab = profile.vocabulary();
    let mut rels = vec![symmetric_relation(n, adj)];
    if vocab.has_successor() {
        rels.push(successor_relation(n));
    }
    Ok(Structure::from_relations(std::sync::Arc::new(vocab), n, rels))
}

/// Probability that `l -> offset + l` embeds the graph `h` on `[k]`:
/// the product over pairs of `p_d` for edges and `1 - p_d` for non-edges.
/// With the successor vocabulary, `S` must be the exact successor of `[k]`.
pub fn interval_embedding_probability(h: &Structure, profile: &EdgeProfile) -> Result<f64> {
    profile.validate()?;
    if !profile.is_stationary() {
        return Err(Error::invalid(
            "aligned embedding probability needs a profile independent of n",
        ));
    }
    if h.vocab().edge_index().is_none() {
        return Err(Error::invalid("pattern has no edge relation"));
    }
    if h.vocab().has_successor() != profile.has_successor() {
        return Err(Error::invalid("pattern and profile disagree on the successor relation"));
    }
    if h.vocab().has_successor() && !h.has_exact_successor() {
        return Ok(0.0);
    }
    let k = h.n();
    let mut q = 1.0;
    for l in 1..=k as Vertex {
        for m in (l + 1)..=k as Vertex {
            let p = profile.prob_at((m - l) as usize, k);
            q *= if h.adjacent(l, m) { p } else { 1.0 - p };
        }
    }
    Ok(q)
}

/// Outcome of [`no_embedding_bound`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoEmbeddingBound {
    /// `(1 - q)^floor(n/k)` with `q` the exact aligned probability of `K_k`.
    pub exact_aligned_miss: f64,
    /// `(1 - k^(-α·C(k,2)))^floor(n/k)`, using `k^-α` as a uniform lower
    /// bound for every edge of `K_k`.
    pub uniform_bound: f64,
    /// `n / k^(α·C(k,2) + 1)`.
    pub beta: f64,
}

impl NoEmbeddingBound {
    /// `e^-β`, the exponential form of the uniform bound.
    pub fn exp_bound(&self) -> f64 {
        (-self.beta).exp()
    }
}

/// Bounds on the probability that no aligned block `[ik+1, ik+k]` carries a
/// copy of `K_k` under case A.
pub fn no_embedding_bound(n: usize, k: usize, alpha: f64) -> Result<NoEmbeddingBound> {
    let profile = EdgeProfile::CaseA { alpha };
    profile.validate()?;
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds n = {n}")));
    }
    let blocks = (n / k) as f64;
    let mut q = 1.0;
    for d in 1..k {
        q *= profile.prob_at(d, n).powi((k - d) as i32);
    }
    let pairs = (k * (k - 1) / 2) as f64;
    let kf = k as f64;
    let uniform = kf.powf(-alpha * pairs);
    Ok(NoEmbeddingBound {
        exact_aligned_miss: (1.0 - q).powf(blocks),
        uniform_bound: (1.0 - uniform).powf(blocks),
        beta: n as f64 / kf.powf(alpha * pairs + 1.0),
    })
}

/// Smallest `k ≥ sqrt((2/α) ln n)`. Values within `1e-9` of an integer are
/// rounded to it, so exact powers of `e` land on the expected integer.
pub fn threshold_k(n: f64, alpha: f64) -> Result<u64> {
    if !(n >= 2.0) || !n.is_finite() {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    EdgeProfile::CaseA { alpha }.validate()?;
    let x = ((2.0 / alpha) * n.ln()).sqrt();
    let r = x.round();
    Ok(if (x - r).abs() < 1e-9 { r as u64 } else { x.ceil() as u64 })
}

/// Largest number of new vertices [`expected_extensions`] enumerates.
pub const EXPECTED_EXTENSION_BOUND: usize = 3;

/// Expected number of extensions of a fixed placement of `A` to `B` in
/// `M_n`, by linearity over injective placements of `B \ A`.
///
/// `b` carries `A` as its first `placed_a.len()` vertices; `placed_a[i]` is
/// the position of vertex `i + 1`. The internal structure of `A` is taken
/// as given; only pairs with at least one new vertex contribute factors.
pub fn expected_extensions(
    profile: &EdgeProfile,
    n: usize,
    placed_a: &[Vertex],
    b: &Structure,
) -> Result<f64> {
    profile.validate()?;
    let a = placed_a.len();
    if a > b.n() {
        return Err(Error::invalid("A has more vertices than B"));
    }
    let new = b.n() - a;
    if new > EXPECTED_EXTENSION_BOUND {
        return Err(Error::too_big("new vertices", new, EXPECTED_EXTENSION_BOUND));
    }
    let mut seen = vec![false; n + 1];
    for &p in placed_a {
        if p == 0 || p as usize > n || std::mem::replace(&mut seen[p as usize], true) {
            return Err(Error::invalid(format!("bad placement position {p}")));
        }
    }
    if b.vocab().has_successor() != profile.has_successor() {
        return Err(Error::invalid("pattern and profile disagree on the successor relation"));
    }
    let succ = b.vocab().successor_index();
    let mut pos: Vec<Vertex> = placed_a.to_vec();
    let mut total = 0.0;
    expected_rec(profile, n, b, succ, &mut pos, &mut seen, 1.0, &mut total);
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn expected_rec(
    profile: &EdgeProfile,
    n: usize,
    b: &Structure,
    succ: Option<usize>,
    pos: &mut Vec<Vertex>,
    used: &mut [bool],
    weight: f64,
    total: &mut f64,
) {
    let v = pos.len();
    if v == b.n() {
        *total += weight;
        return;
    }
    let bv = v as Vertex + 1;
    for x in 1..=n as Vertex {
        if used[x as usize] {
            continue;
        }
        let mut w = weight;
        for (u, &pu) in pos.iter().enumerate() {
            let bu = u as Vertex + 1;
            let p = profile.prob_at(pu.abs_diff(x) as usize, n);
            w *= if b.adjacent(bu, bv) { p } else { 1.0 - p };
            if let Some(s) = succ {
                if b.holds(s, &[bu, bv]) != (x == pu + 1) || b.holds(s, &[bv, bu]) != (pu == x + 1) {
                    w = 0.0;
                }
            }
            if w == 0.0 {
                break;
            }
        }
        if w == 0.0 {
            continue;
        }
        used[x as usize] = true;
        pos.push(x);
        expected_rec(profile, n, b, succ, pos, used, w, total);
        pos.pop();
        used[x as usize] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const A05: EdgeProfile = EdgeProfile::CaseA { alpha: 0.5 };

    #[test]
    fn edge_probabilities() {
        assert_relative_eq!(edge_probability(&A05, 10, 1, 5).unwrap(), 0.5);
        assert_relative_eq!(edge_probability(&A05, 10, 3, 2).unwrap(), 2f64.powf(-0.5));
        assert_relative_eq!(edge_probability(&A05, 10, 3, 5).unwrap(), 2f64.powf(-0.5));
        assert_eq!(edge_probability(&A05, 10, 4, 4).unwrap(), 0.0);
        let second = EdgeProfile::SecondContext { alpha: 0.5 };
        assert_relative_eq!(edge_probability(&second, 16, 1, 3).unwrap(), 0.5);
        assert_eq!(edge_probability(&second, 2, 1, 2).unwrap(), 1.0);
        assert!(edge_probability(&A05, 10, 0, 5).is_err());
        assert!(edge_probability(&A05, 10, 1, 11).is_err());
        let b = EdgeProfile::CaseB { alpha: 0.5 };
        assert_eq!(edge_probability(&b, 4, 1, 2).unwrap(), 1.0);
    }

    #[test]
    fn custom_and_sparsified() {
        let c = EdgeProfile::Custom { probs: vec![0.1, 0.2] };
        assert_eq!(c.prob_at(2, 9), 0.2);
        assert_eq!(c.prob_at(3, 9), 0.0);
        let s = EdgeProfile::Sparsified { probs: vec![0.5, 0.25], indices: vec![2, 7] };
        s.validate().unwrap();
        assert_eq!(s.prob_at(7, 20), 0.25);
        assert_eq!(s.prob_at(3, 20), 0.0);
        assert!(EdgeProfile::Sparsified { probs: vec![0.5], indices: vec![3, 2] }
            .validate()
            .is_err());
        assert!(EdgeProfile::CaseA { alpha: 1.0 }.validate().is_err());
        assert!(EdgeProfile::Custom { probs: vec![1.5] }.validate().is_err());
    }

    #[test]
    fn profile_json() {
        let s = serde_json::to_string(&A05).unwrap();
        assert_eq!(s, r#"{"variant":"caseA","alpha":0.5}"#);
        let back: EdgeProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, A05);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample(&A05, 32, Seed::new(7)).unwrap();
        let b = sample(&A05, 32, Seed::new(7)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample(&A05, 32, Seed::new(7).trial(1)).unwrap());
        a.check_invariants().unwrap();
        assert_eq!(sample(&A05, 1, Seed::new(1)).unwrap().edge_count(), 0);
    }

    #[test]
    fn case_b_carries_successor() {
        let g = sample(&EdgeProfile::CaseB { alpha: 0.5 }, 20, Seed::new(3)).unwrap();
        assert!(g.has_exact_successor());
        // p_1 = 1 in case B.
        assert!((1..20).all(|i| g.adjacent(i, i + 1)));
        g.check_invariants().unwrap();
    }

    #[test]
    fn extreme_probabilities() {
        let full = EdgeProfile::Custom { probs: vec![1.0; 10] };
        assert_eq!(sample(&full, 11, Seed::new(0)).unwrap().edge_count(), 55);
        let none = EdgeProfile::Custom { probs: vec![] };
        assert_eq!(sample(&none, 11, Seed::new(0)).unwrap().edge_count(), 0);
    }

    #[test]
    fn sparse_diagonal_frequency() {
        // p = 0.05 exercises the skip path: 200 samples x 999 pairs.
        let p = EdgeProfile::Custom { probs: vec![0.05] };
        let mut hits = 0usize;
        let trials = 200;
        for t in 0..trials {
            hits += sample(&p, 1000, Seed::new(11).trial(t)).unwrap().edge_count();
        }
        let pairs = (trials as f64) * 999.0;
        let sigma = (pairs * 0.05 * 0.95).sqrt();
        assert!((hits as f64 - pairs * 0.05).abs() < 4.0 * sigma, "{hits}");
    }

    #[test]
    fn interval_products() {
        let k2 = Structure::complete_graph(2);
        assert_relative_eq!(
            interval_embedding_probability(&k2, &A05).unwrap(),
            2f64.powf(-0.5),
            epsilon = 1e-12
        );
        let k3 = Structure::complete_graph(3);
        assert_relative_eq!(
            interval_embedding_probability(&k3, &A05).unwrap(),
            2f64.powf(-1.5),
            epsilon = 1e-12
        );
        let e2 = Structure::graph(2, &[]).unwrap();
        assert_relative_eq!(
            interval_embedding_probability(&e2, &A05).unwrap(),
            1.0 - 2f64.powf(-0.5),
            epsilon = 1e-12
        );
        let second = EdgeProfile::SecondContext { alpha: 0.5 };
        assert!(interval_embedding_probability(&k2, &second).is_err());
    }

    #[test]
    fn no_embedding_examples() {
        let b = no_embedding_bound(8, 2, 0.5).unwrap();
        assert_relative_eq!(b.uniform_bound, (1.0 - 2f64.powf(-0.5)).powi(4), epsilon = 1e-12);
        assert_relative_eq!(b.uniform_bound, 0.007_36, epsilon = 1e-5);
        assert_relative_eq!(b.exact_aligned_miss, b.uniform_bound, epsilon = 1e-15);

        let b = no_embedding_bound(30, 3, 0.5).unwrap();
        assert_relative_eq!(b.exact_aligned_miss, (1.0 - 2f64.powf(-1.5)).powi(10), epsilon = 1e-12);
        assert_relative_eq!(b.exact_aligned_miss, 0.0128, epsilon = 1e-4);
        assert_relative_eq!(b.uniform_bound, (1.0 - 3f64.powf(-1.5)).powi(10), epsilon = 1e-12);
        assert_relative_eq!(b.uniform_bound, 0.1180, epsilon = 1e-4);
        assert!(b.exact_aligned_miss <= b.uniform_bound);
        assert!(no_embedding_bound(3, 4, 0.5).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(threshold_k(std::f64::consts::E, 0.5).unwrap(), 2);
        assert_eq!(threshold_k(8f64.exp(), 0.5).unwrap(), 6);
        let mut last = 0;
        for n in 2..2000 {
            let k = threshold_k(n as f64, 0.3).unwrap();
            assert!(k >= last);
            last = k;
        }
        assert!(threshold_k(1.0, 0.5).is_err());
    }

    #[test]
    fn expected_extension_examples() {
        let k1 = Structure::complete_graph(1);
        assert_relative_eq!(expected_extensions(&A05, 5, &[3], &k1).unwrap(), 1.0);

        let k2 = Structure::complete_graph(2);
        assert_relative_eq!(
            expected_extensions(&A05, 3, &[1], &k2).unwrap(),
            2.0 * 2f64.powf(-0.5),
            epsilon = 1e-12
        );

        // Common neighbour of (i, i+1): direct summation.
        let k3 = Structure::complete_graph(3);
        let alpha = 0.3;
        let p = EdgeProfile::CaseA { alpha };
        let n = 200;
        let i = 50;
        let direct: f64 = (1..=n as Vertex)
            .filter(|&x| x != i && x != i + 1)
            .map(|x| p.prob_at(x.abs_diff(i) as usize, n) * p.prob_at(x.abs_diff(i + 1) as usize, n))
            .sum();
        assert_relative_eq!(
            expected_extensions(&p, n, &[i, i + 1], &k3).unwrap(),
            direct,
            epsilon = 1e-9
        );
        let big = Structure::graph(5, &[]).unwrap();
        assert!(expected_extensions(&A05, 10, &[1], &big).is_err());
    }
}
