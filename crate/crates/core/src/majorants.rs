//! Majorants sampled at dyadic nodes, the square Dini sum, and the
//! construction of a majorant adapted to a Young function `Ψ` with
//! `Ψ(x)/x² ↓ 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::orlicz::YoungFunction;
use crate::{Error, Result};

const LN2: f64 = std::f64::consts::LN_2;
const BLOCK_CAP: usize = 1_000_000;
const ROOT_BRACKET_LO: f64 = 1.0 / (1u64 << 60) as f64;

/// Positive nondecreasing function on `(0, 1]` given by its values
/// `w_k = w(2^{-k})`, `k = 0..=K`, piecewise linear in between.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MajorantRepr", into = "MajorantRepr")]
pub struct Majorant {
    levels: Vec<f64>,
    gamma_candidate: f64,
    c_ratio: f64,
}

#[derive(Serialize, Deserialize)]
struct MajorantRepr {
    nodes: Vec<[f64; 2]>,
    gamma_candidate: f64,
    #[serde(default)]
    c_ratio: Option<f64>,
}

impl TryFrom<MajorantRepr> for Majorant {
    type Error = Error;
    fn try_from(r: MajorantRepr) -> Result<Self> {
        for (k, [t, _]) in r.nodes.iter().enumerate() {
            let expect = 0.5f64.powi(k as i32);
            if (t - expect).abs() > 1e-12 * expect {
                return Err(Error::Invalid(format!(
                    "node {k} has t = {t}, expected 2^-{k}"
                )));
            }
        }
        Majorant::from_levels(r.nodes.iter().map(|n| n[1]).collect(), r.gamma_candidate)
    }
}

impl From<Majorant> for MajorantRepr {
    fn from(m: Majorant) -> Self {
        let nodes = m
            .levels
            .iter()
            .enumerate()
            .map(|(k, &w)| [0.5f64.powi(k as i32), w])
            .collect();
        MajorantRepr {
            nodes,
            gamma_candidate: m.gamma_candidate,
            c_ratio: Some(m.c_ratio),
        }
    }
}

impl Majorant {
    pub fn from_levels(levels: Vec<f64>, gamma_candidate: f64) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Invalid("majorant needs at least one node".into()));
        }
        if levels.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Invalid(
                "majorant values must be positive and finite".into(),
            ));
        }
        if let Some(k) = levels.windows(2).position(|p| p[1] > p[0] * (1.0 + 1e-12)) {
            return Err(Error::Invalid(format!(
                "majorant decreases in t between nodes {k} and {}",
                k + 1
            )));
        }
        if !(gamma_candidate > 0.0 && gamma_candidate < 1.0) {
            return Err(Error::Invalid(format!(
                "gamma candidate {gamma_candidate} not in (0,1)"
            )));
        }
        let c_ratio = levels.windows(2).map(|p| p[0] / p[1]).fold(1.0, f64::max);
        Ok(Self {
            levels,
            gamma_candidate,
            c_ratio,
        })
    }

    /// Nodes of `f` at `2^{-k}`, `k = 0..=k_max`.
    pub fn from_fn(f: impl Fn(f64) -> f64, k_max: usize, gamma_candidate: f64) -> Result<Self> {
        Self::from_levels(
            (0..=k_max).map(|k| f(0.5f64.powi(k as i32))).collect(),
            gamma_candidate,
        )
    }

    pub fn constant(c: f64, k_max: usize) -> Result<Self> {
        Self::from_levels(vec![c; k_max + 1], 0.5)
    }

    /// `t^a`, `0 < a < 1`, with `γ = a`.
    pub fn power(a: f64, k_max: usize) -> Result<Self> {
        Self::from_fn(|t| t.powf(a), k_max, a)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn gamma_candidate(&self) -> f64 {
        self.gamma_candidate
    }

    /// `max_k w_k / w_{k+1}`.
    pub fn c_ratio(&self) -> f64 {
        self.c_ratio
    }

    /// `w(t)`; values above 1 clamp to `w(1)`.
    pub fn eval(&self, t: f64) -> f64 {
        let k_max = self.depth();
        if t >= 1.0 || k_max == 0 {
            return self.levels[0];
        }
        if t <= 0.0 {
            return self.eval(f64::MIN_POSITIVE);
        }
        let k = (-t.log2()).floor() as usize;
        if k >= k_max {
            let lo = 0.5f64.powi(k_max as i32);
            let slope = (self.levels[k_max - 1] - self.levels[k_max]) / lo;
            return (self.levels[k_max] + slope * (t - lo)).max(0.0);
        }
        if k > 1000 {
            return self.levels[k];
        }
        // t ∈ [2^{-(k+1)}, 2^{-k}); s ∈ [0, 1)
        let s = (t * 2f64.powi(k as i32 + 1) - 1.0).clamp(0.0, 1.0);
        self.levels[k + 1] + (self.levels[k] - self.levels[k + 1]) * s
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SquareDiniTable {
    /// `S_N = Σ_{n≤N} w(2^{-n})²`, `N = 1..=n_max`.
    pub partial_sums: Vec<f64>,
    /// Least-squares slope of `S_N` against `ln N` over `N ∈ [n_max/4, n_max]`.
    pub growth_slope: f64,
}

impl SquareDiniTable {
    /// First `N` with `S_N > threshold`.
    pub fn crossing(&self, threshold: f64) -> Option<usize> {
        self.partial_sums
            .iter()
            .position(|&s| s > threshold)
            .map(|i| i + 1)
    }
}

pub fn square_dini_partial(w: &Majorant, n_max: usize) -> Result<SquareDiniTable> {
    if n_max == 0 || n_max > w.depth() {
        return Err(Error::Precondition(format!(
            "n_max = {n_max} must lie in 1..={}",
            w.depth()
        )));
    }
    let mut acc = 0.0;
    let partial_sums: Vec<f64> = w.levels[1..=n_max]
        .iter()
        .map(|v| {
            acc += v * v;
            acc
        })
        .collect();
    let lo = (n_max / 4).max(1);
    let pts: Vec<(f64, f64)> = (lo..=n_max)
        .map(|n| ((n as f64).ln(), partial_sums[n - 1]))
        .collect();
    let growth_slope = if pts.len() < 2 {
        0.0
    } else {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    Ok(SquareDiniTable {
        partial_sums,
        growth_slope,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MajorantTrace {
    /// `t_n` for `n = 1..=n_blocks + 1`.
    pub t: Vec<f64>,
    /// `N_n` for `n = 1..=n_blocks`.
    pub block_sizes: Vec<usize>,
    /// `Σ_k t_{n,k}` per block.
    pub block_sums: Vec<f64>,
    /// `Σ_k α(t_{n,k})` per block.
    pub alpha_block_sums: Vec<f64>,
    pub interleaved: usize,
    pub sequence_len: usize,
    pub max_sequence_ratio: f64,
    /// First `n` with `Ψ(w(2^{-n})) < 1e-6`; all later increments are smaller.
    pub n0: Option<usize>,
    /// First `N` with square Dini partial sum above 10.
    pub dini_crossing: Option<usize>,
    pub warnings: Vec<String>,
}

fn bisect_root(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Builds the adapted majorant: blocks between consecutive roots of
/// `α(t)/t = 1/n²` (`α(t) = Ψ(√t)`), refined into `⌈1/t_n⌉` equal steps,
/// made ratio-regular by inserting every `2^{-j}`, then `w(2^{-j}) = √w_j`.
pub fn construct_majorant(
    psi: &YoungFunction,
    n_blocks: usize,
) -> Result<(Majorant, MajorantTrace)> {
    if n_blocks == 0 {
        return Err(Error::Invalid("need at least one block".into()));
    }
    let r: Vec<f64> = (0..=60)
        .map(|k| psi.value(0.5f64.powi(k)) * 4f64.powi(k))
        .collect();
    if r.windows(2).any(|p| p[1] >= p[0]) || r[60] > 1e-3 * r[0] {
        return Err(Error::Precondition(
            "Ψ(x)/x² does not decrease to 0 as x ↓ 0".into(),
        ));
    }
    let alpha = |t: f64| psi.value(t.sqrt());
    let t: Vec<f64> = (1..=n_blocks + 1)
        .into_par_iter()
        .map(|n| {
            let target = 1.0 / (n * n) as f64;
            let g = |x: f64| alpha(x) / x - target;
            let (glo, ghi) = (g(ROOT_BRACKET_LO), g(1.0));
            if !(glo <= 0.0 && ghi >= 0.0) {
                return Err(Error::Construction {
                    block: n,
                    reason: format!("α(t)/t − 1/n² has signs ({glo:e}, {ghi:e}) on [2^-60, 1]"),
                });
            }
            Ok(bisect_root(g, ROOT_BRACKET_LO, 1.0))
        })
        .collect::<Result<_>>()?;

    let mut warnings = Vec::new();
    let mut seq = Vec::new();
    let mut block_sizes = Vec::with_capacity(n_blocks);
    let mut block_sums = Vec::with_capacity(n_blocks);
    let mut alpha_block_sums = Vec::with_capacity(n_blocks);
    for n in 0..n_blocks {
        let (tn, tn1) = (t[n], t[n + 1]);
        let mut size = (1.0 / tn).ceil() as usize;
        if size > BLOCK_CAP {
            warnings.push(format!(
                "block {} capped at {BLOCK_CAP} points (⌈1/t_n⌉ = {size})",
                n + 1
            ));
            size = BLOCK_CAP;
        }
        let (mut s, mut sa) = (0.0, 0.0);
        for k in (1..=size).rev() {
            let v = tn1 + (k as f64 / size as f64) * (tn - tn1);
            s += v;
            sa += alpha(v);
            seq.push(v);
        }
        block_sizes.push(size);
        block_sums.push(s);
        alpha_block_sums.push(sa);
    }
    let smallest = *seq.last().unwrap();
    let j_max = (-smallest.log2()).ceil() as i32;
    seq.extend((0..=j_max).map(|j| 0.5f64.powi(j)));
    seq.sort_by(|a, b| b.total_cmp(a));
    seq.dedup();
    let max_sequence_ratio = seq.windows(2).map(|p| p[0] / p[1]).fold(1.0, f64::max);

    let levels: Vec<f64> = seq.iter().map(|v| v.sqrt()).collect();
    let c_ratio = levels.windows(2).map(|p| p[0] / p[1]).fold(1.0, f64::max);
    let gamma = (c_ratio.log2()).clamp(0.01, 0.99);
    let w = Majorant::from_levels(levels, gamma)?;
    let n0 = seq
        .iter()
        .skip(1)
        .position(|&v| alpha(v) < 1e-6)
        .map(|i| i + 1);
    let dini = square_dini_partial(&w, w.depth())?;
    let trace = MajorantTrace {
        t,
        block_sizes,
        block_sums,
        alpha_block_sums,
        interleaved: (j_max + 1) as usize,
        sequence_len: seq.len(),
        max_sequence_ratio,
        n0,
        dini_crossing: dini.crossing(10.0),
        warnings,
    };
    Ok((w, trace))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaReading {
    pub gamma: f64,
    /// `w(t)/t^γ` nondecreasing in `t` on the nodes.
    pub nondecreasing: bool,
    /// `w(t)/t^γ` nonincreasing in `t` on the nodes.
    pub nonincreasing: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularityReport {
    pub c_ratio: f64,
    pub readings: Vec<GammaReading>,
    pub w_over_t_nonincreasing: bool,
    pub candidate: GammaReading,
}

fn reading(w: &Majorant, gamma: f64) -> GammaReading {
    // On nodes, w/t^γ nondecreasing in t ⟺ ln(w_k/w_{k+1}) ≥ γ ln 2 for all k.
    let tol = 1e-12;
    let logs: Vec<f64> = w.levels.windows(2).map(|p| (p[0] / p[1]).ln()).collect();
    GammaReading {
        gamma,
        nondecreasing: logs.iter().all(|&l| l >= gamma * LN2 - tol),
        nonincreasing: logs.iter().all(|&l| l <= gamma * LN2 + tol),
    }
}

pub fn majorant_regularity_check(w: &Majorant) -> RegularityReport {
    RegularityReport {
        c_ratio: w.c_ratio,
        readings: (1..=9).map(|i| reading(w, i as f64 / 10.0)).collect(),
        w_over_t_nonincreasing: reading(w, 1.0).nonincreasing,
        candidate: reading(w, w.gamma_candidate),
    }
}
