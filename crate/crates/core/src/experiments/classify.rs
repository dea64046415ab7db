//! Empirical classification of a pair `A ⊆ B` by how the number of
//! extensions of a placed copy of `A` grows with `n`, and the matching
//! growth of disjoint extension families.
//!
//! A placement puts the vertices of `A` (in increasing label order) at
//! consecutive positions `s, s+1, ...` of `M_n`; it is used only when that
//! map is an embedding. Per sample the statistic is the maximum over the
//! placements; per `n` it is the median over trials. The slope of
//! `ln max(median, 1)` against `g(n)` (`ln n` for power growth) estimates
//! the growth exponent.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::GrowthFunction;
use super::stats::{linear_fit, median, LinearFit};
use crate::embeddings::{count_extensions, max_disjoint_family, ExtensionQuery, FamilyStrategy};
use crate::error::{Error, Result};
use crate::sampler::{sample, EdgeProfile, Seed};
use crate::structures::{is_embedding, PartialEmbedding, Structure, Vertex, VertexSet};

/// Most new vertices a classified pair may have.
pub const MAX_NEW_VERTICES: usize = 3;

/// Per-placement extension counts stop here.
pub const COUNT_LIMIT: u64 = 1_000_000;

const PLACEMENT_TAG: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum Placement {
    /// One start per stratum of `[1, n]`, uniform inside the stratum; when
    /// that start does not embed `A`, the next ones in the stratum are
    /// tried in order.
    Stratified { strata: usize },
    /// Uniform random starts, with the same fallback inside `[s, n]`.
    Random { count: usize },
    /// Evenly spaced starts with the same fallback.
    Grid { count: usize },
    /// Every start.
    Exhaustive,
}

impl Default for Placement {
    fn default() -> Self {
        Placement::Stratified { strata: 32 }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Placement::Stratified { strata } => write!(f, "stratified:{strata}"),
            Placement::Random { count } => write!(f, "random:{count}"),
            Placement::Grid { count } => write!(f, "grid:{count}"),
            Placement::Exhaustive => write!(f, "exhaustive"),
        }
    }
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exhaustive" {
            return Ok(Placement::Exhaustive);
        }
        let bad = || Error::invalid(format!("unknown placement {s:?}"));
        let (kind, count) = s.split_once(':').ok_or_else(bad)?;
        let count: usize = count.parse().map_err(|_| bad())?;
        if count == 0 {
            return Err(bad());
        }
        match kind {
            "stratified" => Ok(Placement::Stratified { strata: count }),
            "random" => Ok(Placement::Random { count }),
            "grid" => Ok(Placement::Grid { count }),
            _ => Err(bad()),
        }
    }
}

/// A pair `A ⊆ B` given by `B` and the vertex set of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub b: Structure,
    pub a: VertexSet,
}

impl Pair {
    pub fn new(b: Structure, a: VertexSet) -> Result<Self> {
        if let Some(&v) = a.iter().find(|&&v| !b.contains(v)) {
            return Err(Error::invalid(format!("vertex {v} of A is not in B")));
        }
        Ok(Pair { b, a })
    }

    pub fn new_vertices(&self) -> usize {
        self.b.n() - self.a.len()
    }
}

/// Base maps for one sample: each chosen start whose consecutive block
/// embeds `A`.
pub(crate) fn placements(pair: &Pair, m: &Structure, policy: Placement, rng: &mut ChaCha8Rng) -> Vec<PartialEmbedding> {
    let width = pair.a.len();
    let n = m.n();
    if width == 0 {
        return vec![PartialEmbedding::empty(pair.b.n())];
    }
    if width > n {
        return Vec::new();
    }
    let last = n - width + 1;
    let base_at = |s: usize| {
        let mut f = PartialEmbedding::empty(pair.b.n());
        for (i, &v) in pair.a.iter().enumerate() {
            f.set(v, (s + i) as Vertex).expect("in range");
        }
        f
    };
    let embeds = |f: &PartialEmbedding| is_embedding(f, &pair.b, m);
    let first_in = |from: usize, to: usize| -> Option<PartialEmbedding> {
        (from..=to).map(base_at).find(|f| embeds(f))
    };
    let mut out = Vec::new();
    match policy {
        Placement::Exhaustive => out.extend((1..=last).map(base_at).filter(|f| embeds(f))),
        Placement::Stratified { strata } => {
            for j in 0..strata {
                let lo = 1 + j * last / strata;
                let hi = (j + 1) * last / strata;
                if lo > hi {
                    continue;
                }
                let s = rng.gen_range(lo..=hi);
                if let Some(f) = first_in(s, hi) {
                    out.push(f);
                }
            }
        }
        Placement::Random { count } => {
            for _ in 0..count {
                let s = rng.gen_range(1..=last);
                if let Some(f) = first_in(s, last) {
                    out.push(f);
                }
            }
        }
        Placement::Grid { count } => {
            for j in 0..count {
                let s = 1 + j * last / count;
                let to = (1 + (j + 1) * last / count).min(last + 1) - 1;
                if let Some(f) = first_in(s, to.max(s)) {
                    out.push(f);
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairVerdict {
    ILike,
    SLike,
    Inconclusive,
}

impl fmt::Display for PairVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairVerdict::ILike => "i-like",
            PairVerdict::SLike => "s-like",
            PairVerdict::Inconclusive => "inconclusive",
        })
    }
}

/// Settings shared by the scans in this module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub ngrid: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub placement: Placement,
}

impl ScanConfig {
    pub fn new(ngrid: Vec<usize>, trials: u64, seed: u64) -> Self {
        ScanConfig {
            ngrid,
            trials,
            seed,
            placement: Placement::default(),
        }
    }

    pub fn with_placement(mut self, placement: Placement) -> Self {
        self.placement = placement;
        self
    }

    fn validate(&self) -> Result<()> {
        let mut distinct = self.ngrid.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 2 || distinct[0] < 2 {
            return Err(Error::invalid("grid needs at least two distinct sizes, all at least 2"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    pub trials: u64,
    /// Median over trials of the per-sample maximum.
    pub median_max: f64,
    pub mean_max: f64,
    pub max_max: u64,
    /// Trials in which no placement embedded `A`.
    pub empty_trials: u64,
    /// Trials in which some count hit [`COUNT_LIMIT`].
    pub capped_trials: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub pair: String,
    pub placement: Placement,
    pub growth: GrowthFunction,
    pub rows: Vec<GrowthRow>,
    pub fit: LinearFit,
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub verdict: PairVerdict,
}

pub const DEFAULT_EPS_LO: f64 = 0.15;
pub const DEFAULT_EPS_HI: f64 = 0.3;

struct TrialStat {
    max: u64,
    empty: bool,
    capped: bool,
}

fn growth_rows<F>(profile: &EdgeProfile, pair: &Pair, cfg: &ScanConfig, per_base: F) -> Result<Vec<GrowthRow>>
where
    F: Fn(&Structure, &PartialEmbedding) -> Result<(u64, bool)> + Sync,
{
    cfg.validate()?;
    profile.validate()?;
    if pair.b.vocab() != &profile.vocabulary() {
        return Err(Error::invalid("pair vocabulary differs from the profile's"));
    }
    let root = Seed::new(cfg.seed);
    cfg.ngrid
        .iter()
        .map(|&n| {
            let stats: Vec<TrialStat> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = root.trial(t);
                    let m = sample(profile, n, seed)?;
                    let mut rng = seed.aux_rng(PLACEMENT_TAG, n);
                    let bases = placements(pair, &m, cfg.placement, &mut rng);
                    let mut st = TrialStat { max: 0, empty: bases.is_empty(), capped: false };
                    for f in &bases {
                        let (v, capped) = per_base(&m, f)?;
                        st.max = st.max.max(v);
                        st.capped |= capped;
                    }
                    Ok(st)
                })
                .collect::<Result<_>>()?;
            let maxes: Vec<f64> = stats.iter().map(|s| s.max as f64).collect();
            Ok(GrowthRow {
                n,
                trials: cfg.trials,
                median_max: median(&maxes).unwrap_or(0.0),
                mean_max: maxes.iter().sum::<f64>() / maxes.len() as f64,
                max_max: stats.iter().map(|s| s.max).max().unwrap_or(0),
                empty_trials: stats.iter().filter(|s| s.empty).count() as u64,
                capped_trials: stats.iter().filter(|s| s.capped).count() as u64,
            })
        })
        .collect()
}

fn fit_rows(rows: &[GrowthRow], h: GrowthFunction) -> Result<LinearFit> {
    let x: Vec<f64> = rows.iter().map(|r| h.exponent_scale(r.n as f64)).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.median_max.max(1.0).ln()).collect();
    linear_fit(&x, &y)
}

fn pair_label(pair: &Pair) -> String {
    crate::structures::pair_type(&pair.b, &pair.a)
        .map(|t| t.code())
        .unwrap_or_else(|_| format!("|A|={} |B|={}", pair.a.len(), pair.b.n()))
}

/// Classify `pair` as i-like (fitted exponent below `eps_lo`), s-like
/// (above `eps_hi`) or inconclusive.
pub fn classify_pair(
    pair: &Pair,
    profile: &EdgeProfile,
    cfg: &ScanConfig,
    h: GrowthFunction,
    eps_lo: f64,
    eps_hi: f64,
) -> Result<ClassificationReport> {
    if pair.new_vertices() > MAX_NEW_VERTICES {
        return Err(Error::too_big("new vertices of the pair", pair.new_vertices(), MAX_NEW_VERTICES));
    }
    if !(eps_lo <= eps_hi) {
        return Err(Error::invalid("eps_lo must not exceed eps_hi"));
    }
    let rows = growth_rows(profile, pair, cfg, |m, f| {
        let c = count_extensions(&ExtensionQuery::new(m, &pair.b, f.clone()).with_limit(COUNT_LIMIT))?;
        Ok((c.value, c.capped))
    })?;
    let fit = fit_rows(&rows, h)?;
    let verdict = if fit.slope < eps_lo {
        PairVerdict::ILike
    } else if fit.slope > eps_hi {
        PairVerdict::SLike
    } else {
        PairVerdict::Inconclusive
    };
    Ok(ClassificationReport {
        pair: pair_label(pair),
        placement: cfg.placement,
        growth: h,
        rows,
        fit,
        eps_lo,
        eps_hi,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub pair: String,
    pub placement: Placement,
    pub rows: Vec<GrowthRow>,
    pub fit: LinearFit,
}

/// Growth of greedy pairwise-disjoint extension families.
pub fn weakly_nice_scan(pair: &Pair, profile: &EdgeProfile, cfg: &ScanConfig) -> Result<FamilyReport> {
    if pair.new_vertices() > MAX_NEW_VERTICES {
        return Err(Error::too_big("new vertices of the pair", pair.new_vertices(), MAX_NEW_VERTICES));
    }
    let rows = growth_rows(profile, pair, cfg, |m, f| {
        let fam = max_disjoint_family(&ExtensionQuery::new(m, &pair.b, f.clone()), FamilyStrategy::Greedy)?;
        Ok((fam.len() as u64, false))
    })?;
    let fit = fit_rows(&rows, GrowthFunction::Power)?;
    Ok(FamilyReport {
        pair: pair_label(pair),
        placement: cfg.placement,
        rows,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::expected_extensions;
    use crate::structures::vset;

    fn common_neighbor() -> Pair {
        Pair::new(Structure::complete_graph(3), vset([1, 2])).unwrap()
    }

    #[test]
    fn placement_names() {
        for s in ["stratified:32", "random:5", "grid:8", "exhaustive"] {
            assert_eq!(s.parse::<Placement>().unwrap().to_string(), s);
        }
        assert!("stratified:0".parse::<Placement>().is_err());
        assert!("everywhere".parse::<Placement>().is_err());
    }

    #[test]
    fn placements_embed_a() {
        let m = sample(&EdgeProfile::CaseA { alpha: 0.5 }, 200, Seed::new(4)).unwrap();
        let pair = common_neighbor();
        let mut rng = Seed::new(4).aux_rng(PLACEMENT_TAG, 200);
        for policy in [Placement::default(), Placement::Random { count: 10 }, Placement::Grid { count: 7 }, Placement::Exhaustive] {
            let ps = placements(&pair, &m, policy, &mut rng);
            assert!(!ps.is_empty());
            assert!(ps.iter().all(|f| is_embedding(f, &pair.b, &m)));
        }
        let empty = Pair::new(Structure::complete_graph(1), vset([])).unwrap();
        assert_eq!(placements(&empty, &m, Placement::default(), &mut rng).len(), 1);
    }

    #[test]
    fn single_vertex_over_nothing_grows_linearly() {
        let pair = Pair::new(Structure::complete_graph(1), vset([])).unwrap();
        let cfg = ScanConfig::new(vec![64, 128, 256], 3, 1);
        let r = classify_pair(&pair, &EdgeProfile::CaseA { alpha: 0.5 }, &cfg, GrowthFunction::Power, 0.15, 0.3).unwrap();
        assert!((r.fit.slope - 1.0).abs() < 1e-9);
        assert_eq!(r.verdict, PairVerdict::SLike);
    }

    #[test]
    fn reflexive_family_is_constant() {
        let pair = Pair::new(Structure::complete_graph(2), vset([1, 2])).unwrap();
        let cfg = ScanConfig::new(vec![64, 128, 256], 4, 2);
        let r = weakly_nice_scan(&pair, &EdgeProfile::CaseA { alpha: 0.5 }, &cfg).unwrap();
        assert!(r.rows.iter().all(|row| row.median_max == 1.0));
        assert_eq!(r.fit.slope, 0.0);
    }

    #[test]
    fn dichotomy_small_grid() {
        // Expected common neighbours of a middle edge: bounded for α = 0.8,
        // growing like n^(1-2α) for α = 0.3.
        let pair = common_neighbor();
        let mid = |alpha: f64, n: usize| {
            let p = EdgeProfile::CaseA { alpha };
            let s = (n / 2) as Vertex;
            expected_extensions(&p, n, &[s, s + 1], &pair.b).unwrap()
        };
        assert!(mid(0.8, 1024) / mid(0.8, 256) < 1.15);
        let ratio = mid(0.3, 1024) / mid(0.3, 256);
        assert!((ratio.log(4.0) - 0.4).abs() < 0.1);

        let cfg = ScanConfig::new(vec![128, 256, 512, 1024], 8, 9);
        let lo = classify_pair(&pair, &EdgeProfile::CaseA { alpha: 0.8 }, &cfg, GrowthFunction::Power, 0.15, 0.3).unwrap();
        assert_eq!(lo.verdict, PairVerdict::ILike, "{lo:?}");
        let hi = classify_pair(&pair, &EdgeProfile::CaseA { alpha: 0.3 }, &cfg, GrowthFunction::Power, 0.15, 0.3).unwrap();
        assert_eq!(hi.verdict, PairVerdict::SLike, "{hi:?}");
    }

    #[test]
    fn degenerate_inputs() {
        let pair = common_neighbor();
        let p = EdgeProfile::CaseA { alpha: 0.5 };
        let h = GrowthFunction::Power;
        assert!(classify_pair(&pair, &p, &ScanConfig::new(vec![64, 64], 2, 0), h, 0.15, 0.3).is_err());
        assert!(classify_pair(&pair, &p, &ScanConfig::new(vec![64, 128], 0, 0), h, 0.15, 0.3).is_err());
        let big = Pair::new(Structure::complete_graph(5), vset([1])).unwrap();
        assert!(classify_pair(&big, &p, &ScanConfig::new(vec![64, 128], 2, 0), h, 0.15, 0.3).is_err());
        let succ = Pair::new(Structure::graph_with_successor(2, &[]).unwrap(), vset([1])).unwrap();
        assert!(classify_pair(&succ, &p, &ScanConfig::new(vec![64, 128], 2, 0), h, 0.15, 0.3).is_err());
    }
}
