//! Sentence-probability estimates across `n` and convergence diagnostics.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::wilson;
use crate::error::{Error, Result};
use crate::logic::{holds_sentence, Formula};
use crate::sampler::{sample, EdgeProfile, Seed};

pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateSeries {
    pub entries: Vec<SeriesEntry>,
    pub profile: EdgeProfile,
    pub formula: String,
    pub seed: u64,
    pub level: f64,
}

fn check_sentence(phi: &Formula, profile: &EdgeProfile) -> Result<()> {
    if !phi.is_sentence() {
        return Err(Error::invalid(format!("formula has free variables {:?}", phi.free_vars())));
    }
    profile.validate()?;
    phi.check_vocab(&profile.vocabulary())
}

/// Fraction of `trials` samples of `M_n` satisfying `phi`, with a Wilson
/// interval at `level`. Trial `t` samples with `Seed::new(seed).trial(t)`.
pub fn estimate_prob_at_level(
    phi: &Formula,
    profile: &EdgeProfile,
    n: usize,
    trials: u64,
    seed: u64,
    level: f64,
) -> Result<SeriesEntry> {
    check_sentence(phi, profile)?;
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let base = Seed::new(seed);
    let hits: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| holds_sentence(&sample(profile, n, base.trial(t))?, phi))
        .collect::<Result<_>>()?;
    let successes = hits.iter().filter(|&&h| h).count() as u64;
    let (ci_low, ci_high) = wilson(successes, trials, level)?;
    Ok(SeriesEntry {
        n,
        trials,
        successes,
        p_hat: successes as f64 / trials as f64,
        ci_low,
        ci_high,
    })
}

pub fn estimate_prob(phi: &Formula, profile: &EdgeProfile, n: usize, trials: u64, seed: u64) -> Result<SeriesEntry> {
    estimate_prob_at_level(phi, profile, n, trials, seed, DEFAULT_LEVEL)
}

/// One estimate per grid point. All points share the root seed; the
/// sampler keys its streams by `n`, so points are independent.
pub fn prob_series(
    phi: &Formula,
    profile: &EdgeProfile,
    ngrid: &[usize],
    trials: u64,
    seed: u64,
) -> Result<EstimateSeries> {
    let entries = ngrid
        .iter()
        .map(|&n| estimate_prob(phi, profile, n, trials, seed))
        .collect::<Result<_>>()?;
    Ok(EstimateSeries {
        entries,
        profile: profile.clone(),
        formula: phi.to_string(),
        seed,
        level: DEFAULT_LEVEL,
    })
}

/// A growth bound `h(n, ε)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthFunction {
    /// `n^ε`
    #[default]
    Power,
    /// `scale · n^ε`
    ScaledPower { scale: f64 },
    /// `(ln n)^ε`
    Log,
}

impl GrowthFunction {
    pub fn eval(&self, n: f64, eps: f64) -> f64 {
        match self {
            GrowthFunction::Power => n.powf(eps),
            GrowthFunction::ScaledPower { scale } => scale * n.powf(eps),
            GrowthFunction::Log => n.ln().powf(eps),
        }
    }

    /// `g(n)` with `h(n, ε) = c · exp(ε · g(n))`; regressing `ln count` on
    /// `g(n)` estimates `ε` in units of `h`.
    pub fn exponent_scale(&self, n: f64) -> f64 {
        match self {
            GrowthFunction::Power | GrowthFunction::ScaledPower { .. } => n.ln(),
            GrowthFunction::Log => n.ln().ln(),
        }
    }

    /// `h(n, ε₂)² ≤ h(n, ε₁)` at every `n` of the grid (up to relative
    /// round-off), the condition under which `≤^h_i` composes.
    pub fn transitive(&self, eps1: f64, eps2: f64, ngrid: &[usize]) -> bool {
        ngrid.iter().all(|&n| {
            let n = n as f64;
            let lhs = self.eval(n, eps2).powi(2);
            let rhs = self.eval(n, eps1);
            lhs <= rhs * (1.0 + 1e-12)
        })
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFunction::Power => write!(f, "power"),
            GrowthFunction::ScaledPower { scale } => write!(f, "scaled:{scale}"),
            GrowthFunction::Log => write!(f, "log"),
        }
    }
}

impl FromStr for GrowthFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(GrowthFunction::Power),
            "log" => Ok(GrowthFunction::Log),
            _ => match s.strip_prefix("scaled:").map(str::parse::<f64>) {
                Some(Ok(scale)) if scale > 0.0 => Ok(GrowthFunction::ScaledPower { scale }),
                _ => Err(Error::invalid(format!("unknown growth function {s:?}"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Tail mean within `delta` of 0 or 1 reads as a 0-1 law.
    pub delta: f64,
    /// Gap size separating "small" from "large".
    pub tau: f64,
    /// Window width `h(n, window_eps)` for the windowed gap.
    pub window_eps: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            delta: 0.05,
            tau: 0.05,
            window_eps: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ZeroOneLike,
    ConvergentLike,
    Oscillating,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ZeroOneLike => "zero-one-like",
            Verdict::ConvergentLike => "convergent-like",
            Verdict::Oscillating => "oscillating",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub verdict: Verdict,
    pub tail_mean: f64,
    pub max_adjacent_gap: f64,
    pub max_window_gap: f64,
    pub thresholds: Thresholds,
}

/// Rules, applied in order:
///
/// * zero-one-like: the mean of the last third (rounded up) of `p̂` is
///   at most `δ` or at least `1 − δ`;
/// * oscillating: two consecutive gaps in the gap window change sign and
///   both exceed `τ` plus their CI noise (root-sum-square of the two
///   half-widths);
/// * convergent-like: every gap in the window is at most `τ`;
/// * otherwise inconclusive.
///
/// The gap window is the last `max(3, ⌈len/3⌉ + 1)` points. The windowed
/// gap is the largest `|p̂_j − p̂_k|` with `n_i ≤ n_j, n_k ≤ n_i + h(n_i)`,
/// maximized over the window's starting points.
pub fn convergence_diagnostics(
    series: &EstimateSeries,
    h: GrowthFunction,
    thresholds: Thresholds,
) -> Result<ConvergenceVerdict> {
    let e = &series.entries;
    let len = e.len();
    if len < 4 {
        return Err(Error::invalid(format!("need at least 4 points, got {len}")));
    }
    let tail_len = len.div_ceil(3);
    let tail_mean = e[len - tail_len..].iter().map(|x| x.p_hat).sum::<f64>() / tail_len as f64;
    let window = &e[len - (tail_len + 1).max(3)..];
    let gaps: Vec<(f64, f64)> = window
        .windows(2)
        .map(|w| {
            let hw = |x: &SeriesEntry| (x.ci_high - x.ci_low) / 2.0;
            (w[1].p_hat - w[0].p_hat, hw(&w[0]).hypot(hw(&w[1])))
        })
        .collect();
    let max_adjacent_gap = e.windows(2).map(|w| (w[1].p_hat - w[0].p_hat).abs()).fold(0.0, f64::max);
    let mut max_window_gap: f64 = 0.0;
    for (i, start) in window.iter().enumerate() {
        let reach = start.n as f64 + h.eval(start.n as f64, thresholds.window_eps);
        let inside: Vec<f64> = window[i..]
            .iter()
            .take_while(|x| x.n as f64 <= reach)
            .map(|x| x.p_hat)
            .collect();
        let hi = inside.iter().copied().fold(f64::MIN, f64::max);
        let lo = inside.iter().copied().fold(f64::MAX, f64::min);
        max_window_gap = max_window_gap.max(hi - lo);
    }
    let significant = |(g, noise): (f64, f64)| g.abs() > thresholds.tau + noise;
    let verdict = if tail_mean <= thresholds.delta || tail_mean >= 1.0 - thresholds.delta {
        Verdict::ZeroOneLike
    } else if gaps
        .windows(2)
        .any(|w| significant(w[0]) && significant(w[1]) && w[0].0.signum() != w[1].0.signum())
    {
        Verdict::Oscillating
    } else if gaps.iter().all(|(g, _)| g.abs() <= thresholds.tau) {
        Verdict::ConvergentLike
    } else {
        Verdict::Inconclusive
    };
    Ok(ConvergenceVerdict {
        verdict,
        tail_mean,
        max_adjacent_gap,
        max_window_gap,
        thresholds,
    })
}
