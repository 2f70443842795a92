//! Outer functions from boundary log-modulus, singular inner functions,
//! Clark pairs `μ ↔ b`, the de Branges–Rovnyak kernel identity and
//! lacunary Riesz products with dyadic-arc diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::fft::root_of_unity;
use crate::analytic::{
    coeffs_from_boundary, coeffs_from_interior, conjugate_function, interior_samples, BoundaryGrid,
    BoundaryMeasure, TaylorSeries, INTERIOR_RADIUS, MAX_INTERIOR_DEGREE,
};
use crate::bloch::DiskGrid;
use crate::majorants::{square_dini_partial, Majorant};
use crate::{Error, Result, C64};

/// Spectral magnitude above which an outer synthesis is flagged.
pub const SPECTRAL_DECAY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OuterSynthesis {
    pub series: TaylorSeries,
    /// `max_j ||G(ζ_j)| − e^{ψ_j}|` for the returned truncated series.
    pub modulus_error: f64,
    /// `max |ψ̂(n)|` over `M/4 ≤ n ≤ M/2`.
    pub spectral_tail: f64,
    pub warning: Option<String>,
}

/// `G = exp(ψ + iψ̃)` on the grid, then its first `degree + 1` coefficients.
pub fn outer_from_log_modulus(psi: &BoundaryGrid, degree: usize) -> Result<OuterSynthesis> {
    let m = psi.len();
    let spec = psi.spectrum();
    let spectral_tail = spec[m / 4..=m / 2]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let conj = conjugate_function(psi);
    let g: Vec<C64> = psi
        .samples()
        .iter()
        .zip(conj.samples())
        .map(|(p, q)| C64::new(p.re, q.re).exp())
        .collect();
    let series = coeffs_from_boundary(&BoundaryGrid::new(g)?, degree)?;
    let back = series.eval_on_circle(1.0, m);
    let modulus_error = back
        .iter()
        .zip(psi.samples())
        .map(|(v, p)| (v.norm() - p.re.exp()).abs())
        .fold(0.0, f64::max);
    let warning = (spectral_tail > SPECTRAL_DECAY_TOL).then(|| {
        format!("log-modulus spectrum reaches {spectral_tail:.3e} beyond M/4; outer synthesis may be inaccurate")
    });
    Ok(OuterSynthesis {
        series,
        modulus_error,
        spectral_tail,
        warning,
    })
}

fn check_positive(mu: &BoundaryMeasure) -> Result<()> {
    if !mu.is_positive() {
        return Err(Error::Precondition("measure must be positive".into()));
    }
    Ok(())
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_INTERIOR_DEGREE {
        return Err(Error::DegreeCap(format!(
            "degree {degree} > {MAX_INTERIOR_DEGREE}"
        )));
    }
    Ok(())
}

/// `S_μ = exp(−∫(ζ+z)/(ζ−z)dμ)` up to `degree`, via the interior circle.
pub fn singular_inner(mu: &BoundaryMeasure, degree: usize) -> Result<TaylorSeries> {
    check_positive(mu)?;
    check_degree(degree)?;
    let l = interior_samples(degree, mu.grid_size().unwrap_or(0));
    let h = mu.herglotz_on_circle(INTERIOR_RADIUS, l);
    let s = h.into_iter().map(|v| (-v).exp()).collect();
    coeffs_from_interior(s, INTERIOR_RADIUS, degree)
}

/// A positive measure, a phase and the self-map with
/// `(1+b)/(1−b) = ∫(ζ+z)/(ζ−z)dμ + iα`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClarkPair {
    pub mu: BoundaryMeasure,
    pub alpha: f64,
    pub b: TaylorSeries,
}

impl ClarkPair {
    /// `b(z)` straight from the Herglotz sum, no truncation.
    pub fn b_at(&self, z: C64) -> Result<C64> {
        let h = self.mu.herglotz(z)? + C64::new(0.0, self.alpha);
        Ok((h - 1.0) / (h + 1.0))
    }
}

/// Test grid for the Clark invariants: radii `0.05k`, `k ≤ 19`, 64 angles.
fn clark_test_points() -> impl Iterator<Item = C64> {
    (0..20).flat_map(|k| (0..64).map(move |j| root_of_unity(j, 64) * (0.05 * k as f64)))
}

pub fn clark_b_from_mu(mu: &BoundaryMeasure, alpha: f64, degree: usize) -> Result<ClarkPair> {
    check_positive(mu)?;
    if mu.total_mass().re <= 0.0 {
        return Err(Error::Precondition("measure has no mass".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::Invalid("phase must be finite".into()));
    }
    check_degree(degree)?;
    let l = interior_samples(degree, mu.grid_size().unwrap_or(0));
    let ia = C64::new(0.0, alpha);
    let samples = mu
        .herglotz_on_circle(INTERIOR_RADIUS, l)
        .into_iter()
        .map(|h| (h + ia - 1.0) / (h + ia + 1.0))
        .collect();
    let b = coeffs_from_interior(samples, INTERIOR_RADIUS, degree)?;
    let pair = ClarkPair {
        mu: mu.clone(),
        alpha,
        b,
    };
    for z in clark_test_points() {
        let h = pair.mu.herglotz(z)?;
        let bz = pair.b_at(z)?;
        if !(h.re > 0.0 && bz.norm() < 1.0) {
            return Err(Error::Precondition(format!(
                "Clark invariant fails at z = {z}"
            )));
        }
    }
    Ok(pair)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KernelCheck {
    /// `K(κ_λ dμ)(z)/K(dμ)(z)`.
    pub normalized: C64,
    /// `(1 − conj(b(λ))b(z))/(1 − λ̄z)`.
    pub kernel: C64,
    pub residual: f64,
}

/// Kernel identity for the normalized Cauchy transform:
/// `K(κ_λdμ)(z)·(1 − conj b(λ))·(1 − b(z)) = (1 − conj b(λ)·b(z))/(1 − λ̄z)`,
/// which reduces to `K_μκ_λ(z)·(1 − conj b(λ)) = kernel` when `μ` is a
/// probability measure and `α = 0`.
pub fn kernel_identity_check(pair: &ClarkPair, lambda: C64, z: C64) -> Result<KernelCheck> {
    if lambda.norm() > 0.9 || z.norm() > 0.9 {
        return Err(Error::Domain(format!(
            "|λ| = {}, |z| = {} must be ≤ 0.9",
            lambda.norm(),
            z.norm()
        )));
    }
    let kd = pair.mu.cauchy_transform(z)?;
    if kd.norm() == 0.0 {
        return Err(Error::Division("K(dμ)(z) = 0".into()));
    }
    let lc = lambda.conj();
    let kk = pair
        .mu
        .cauchy_transform_weighted(z, |zeta| 1.0 / (1.0 - lc * zeta))?;
    let (bl, bz) = (pair.b_at(lambda)?, pair.b_at(z)?);
    let kernel = (1.0 - bl.conj() * bz) / (1.0 - lc * z);
    let lhs = kk * (1.0 - bl.conj()) * (1.0 - bz);
    Ok(KernelCheck {
        normalized: kk / kd,
        kernel,
        residual: (lhs - kernel).norm(),
    })
}

pub fn kernel_identity_residual(pair: &ClarkPair, lambda: C64, z: C64) -> Result<f64> {
    Ok(kernel_identity_check(pair, lambda, z)?.residual)
}

/// Max residual over an `n × n` grid of `λ` and of `z` points of modulus
/// at most `radius`, scanned in parallel.
pub fn kernel_identity_grid(pair: &ClarkPair, n: usize, radius: f64) -> Result<f64> {
    let pts: Vec<C64> = (0..n)
        .map(|k| {
            let r = radius * (k as f64 + 0.5) / n as f64;
            root_of_unity((7 * k) as i64, n.max(1)) * r
        })
        .collect();
    let rows: Vec<f64> = pts
        .par_iter()
        .map(|&l| {
            pts.iter()
                .map(|&z| kernel_identity_residual(pair, l, z))
                .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszProductSpec {
    pub frequencies: Vec<u64>,
    pub amplitudes: Vec<f64>,
    pub grid_m: usize,
}

impl RieszProductSpec {
    pub fn depth(&self) -> usize {
        self.frequencies.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.frequencies.len() != self.amplitudes.len() {
            return Err(Error::Invalid(
                "frequencies and amplitudes differ in length".into(),
            ));
        }
        if !self.grid_m.is_power_of_two() || self.grid_m < 16 {
            return Err(Error::Invalid(format!(
                "grid size {} must be a power of two ≥ 16",
                self.grid_m
            )));
        }
        if self.frequencies.first().is_some_and(|&n| n == 0) {
            return Err(Error::Invalid("frequencies must be positive".into()));
        }
        if self.frequencies.windows(2).any(|p| p[1] < 3 * p[0]) {
            return Err(Error::Invalid(
                "frequencies must satisfy n_{k+1} ≥ 3·n_k".into(),
            ));
        }
        if self.amplitudes.iter().any(|a| !(a.abs() < 1.0)) {
            return Err(Error::Invalid("amplitudes must lie in (−1, 1)".into()));
        }
        let total: u64 = self.frequencies.iter().sum();
        if total >= self.grid_m as u64 / 2 {
            return Err(Error::Precondition(format!(
                "Σ n_k = {total} aliases on a {}-point grid",
                self.grid_m
            )));
        }
        Ok(())
    }
}

/// Reference levels for the two arc conditions.
pub const ARC_REFERENCE_1: f64 = 8.0;
pub const ARC_REFERENCE_2: f64 = 36.0;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ArcRow {
    pub arc_j: u32,
    pub arc_k: u64,
    pub ratio1: f64,
    pub ratio2: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArcDiagnostics {
    pub mass: f64,
    pub rows: Vec<ArcRow>,
    pub max_ratio1: f64,
    pub max_ratio2: f64,
    pub within_reference1: bool,
    pub within_reference2: bool,
}

/// `α(t) = log log(e² + 1/t)`.
pub fn loglog_profile(t: f64) -> f64 {
    (std::f64::consts::E.powi(2) + 1.0 / t).ln().ln()
}

/// Named arc profiles for configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    LogLog,
    Constant { value: f64 },
    Power { exponent: f64 },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::LogLog => loglog_profile(t),
            Profile::Constant { value } => *value,
            Profile::Power { exponent } => t.powf(*exponent),
        }
    }
}

/// Dyadic-arc masses of a density measure against profiles `α`, `β`:
/// `μ(I)/(|I|α(|I|))` and `|μ(I) − μ(I′)|/(|I|β(|I|))` for `I′` the next arc.
pub fn arc_diagnostics(
    mu: &BoundaryMeasure,
    alpha: impl Fn(f64) -> f64 + Sync,
    beta: impl Fn(f64) -> f64 + Sync,
) -> Result<ArcDiagnostics> {
    let d = mu
        .density()
        .ok_or_else(|| Error::Invalid("arc diagnostics need a density".into()))?;
    if !mu.atoms().is_empty() {
        return Err(Error::Invalid(
            "arc diagnostics expect a pure density".into(),
        ));
    }
    let m = d.len();
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &x in d {
        acc += x / m as f64;
        prefix.push(acc);
    }
    let levels = m.trailing_zeros().saturating_sub(2);
    let rows: Vec<ArcRow> = (1..=levels)
        .into_par_iter()
        .flat_map_iter(|j| {
            let count = 1usize << j;
            let cells = m / count;
            let len = 1.0 / count as f64;
            let (a, b) = (alpha(len), beta(len));
            let prefix = &prefix;
            (0..count).map(move |k| {
                let mass = |i: usize| prefix[(i + 1) * cells] - prefix[i * cells];
                let (mi, mn) = (mass(k), mass((k + 1) % count));
                ArcRow {
                    arc_j: j,
                    arc_k: k as u64,
                    ratio1: mi / (len * a),
                    ratio2: (mi - mn).abs() / (len * b),
                }
            })
        })
        .collect();
    let max_ratio1 = rows.iter().map(|r| r.ratio1).fold(0.0, f64::max);
    let max_ratio2 = rows.iter().map(|r| r.ratio2).fold(0.0, f64::max);
    Ok(ArcDiagnostics {
        mass: acc,
        rows,
        max_ratio1,
        max_ratio2,
        within_reference1: max_ratio1 <= ARC_REFERENCE_1,
        within_reference2: max_ratio2 <= ARC_REFERENCE_2,
    })
}

/// Density `Π_k (1 + a_k cos(2π n_k θ))` on the grid plus arc diagnostics
/// against `α = β = log log(e² + 1/t)`.
pub fn riesz_product_measure(spec: &RieszProductSpec) -> Result<(BoundaryMeasure, ArcDiagnostics)> {
    riesz_product_with_profiles(spec, loglog_profile, loglog_profile)
}

pub fn riesz_product_with_profiles(
    spec: &RieszProductSpec,
    alpha: impl Fn(f64) -> f64 + Sync,
    beta: impl Fn(f64) -> f64 + Sync,
) -> Result<(BoundaryMeasure, ArcDiagnostics)> {
    spec.validate()?;
    let m = spec.grid_m;
    let density: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|j| {
            spec.frequencies
                .iter()
                .zip(&spec.amplitudes)
                .map(|(&n, &a)| {
                    1.0 + a * root_of_unity(((n % m as u64) * j as u64 % m as u64) as i64, m).re
                })
                .product()
        })
        .collect();
    let mu = BoundaryMeasure::zero().with_density(density)?;
    let diag = arc_diagnostics(&mu, alpha, beta)?;
    Ok((mu, diag))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CyclicCandidate {
    pub series: TaylorSeries,
    pub spec: RieszProductSpec,
    pub arcs: ArcDiagnostics,
    /// `inf_z |S(z)|/exp(−c₁α(1−|z|))` on the disk grid.
    pub lower_ratio: f64,
    /// `sup_z (1−|z|)|S′(z)|/β(1−|z|)` on the disk grid.
    pub upper_ratio: f64,
    pub dini_slope: f64,
    pub grid: DiskGrid,
}

/// Slope of the square Dini partial sums against `ln N` below which a
/// majorant is treated as satisfying the square Dini condition.
pub const DINI_DIVERGENCE_SLOPE: f64 = 0.5;

/// Riesz-product stand-in for a cyclic singular inner function in `B₀(w)`:
/// frequencies `4^k`, amplitudes `min(0.9, β(4^{-k}))` with
/// `β = w·exp(−c₁α)`, `α = log log(e² + 1/t)`.
pub fn cyclic_inner_candidate(w: &Majorant, c1: f64, depth: usize) -> Result<CyclicCandidate> {
    if depth == 0 || depth > 7 {
        return Err(Error::Invalid(format!("depth {depth} outside 1..=7")));
    }
    let n_max = w.depth().min(4096);
    let dini = square_dini_partial(w, n_max)?;
    if dini.growth_slope < DINI_DIVERGENCE_SLOPE {
        return Err(Error::Precondition(format!(
            "square Dini sums converge (growth slope {:.3}); no cyclic singular inner function to build",
            dini.growth_slope
        )));
    }
    let beta = |t: f64| w.eval(t) * (-c1 * loglog_profile(t)).exp();
    let frequencies: Vec<u64> = (1..=depth as u32).map(|k| 4u64.pow(k)).collect();
    let amplitudes = frequencies
        .iter()
        .map(|&n| beta(1.0 / n as f64).min(0.9))
        .collect();
    let total: u64 = frequencies.iter().sum();
    let grid_m = (8 * total as usize).next_power_of_two().max(1024);
    let spec = RieszProductSpec {
        frequencies,
        amplitudes,
        grid_m,
    };
    let (mu, arcs) = riesz_product_with_profiles(&spec, loglog_profile, beta)?;
    let degree = (4 * *spec.frequencies.last().unwrap() as usize).clamp(256, MAX_INTERIOR_DEGREE);
    let series = singular_inner(&mu, degree)?;

    let grid = DiskGrid::default();
    let n = grid.n_angles();
    let rows: Vec<(f64, f64)> = grid
        .radii()
        .par_iter()
        .map(|&r| {
            let t = 1.0 - r;
            let (h, dh) = if r == 0.0 {
                let h0 = mu.herglotz(C64::new(0.0, 0.0)).unwrap_or_default();
                let dh0 = 2.0 * mu.fourier_coeff(1);
                (vec![h0; n], vec![dh0; n])
            } else {
                (
                    mu.herglotz_on_circle(r, n),
                    mu.herglotz_derivative_on_circle(r, n),
                )
            };
            let floor = (-c1 * loglog_profile(t)).exp();
            let lo = h
                .iter()
                .map(|v| (-v.re).exp() / floor)
                .fold(f64::INFINITY, f64::min);
            let hi = h
                .iter()
                .zip(&dh)
                .map(|(v, d)| t * (d * (-v).exp()).norm() / beta(t))
                .fold(0.0, f64::max);
            (lo, hi)
        })
        .collect();
    let lower_ratio = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let upper_ratio = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(CyclicCandidate {
        series,
        spec,
        arcs,
        lower_ratio,
        upper_ratio,
        dini_slope: dini.growth_slope,
        grid,
    })
}

/// `max |S(z)|` over the Clark test grid, for the bound `|S_μ| ≤ 1`.
pub fn sup_on_test_grid(f: &TaylorSeries) -> f64 {
    (0..20)
        .map(|k| {
            f.eval_on_circle(0.05 * k as f64, 64)
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
