//! Simultaneous approximation in `ℓ¹_a(w)`: outer factors with prescribed
//! modulus on an arc, their lifts `F(z^m)`, the running intersection `K` of
//! the lifted arcs, and the pairing estimate that kills measures on `K`.

mod arcs;
mod weights;

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use arcs::{ratio, ratio_from_f64, ArcSet};
pub use weights::{WeightRule, WeightSequence};

use crate::analytic::{fft, BoundaryGrid, BoundaryMeasure, TaylorSeries};
use crate::innerouter::outer_from_log_modulus;
use crate::{Error, Result, C64};

/// `√(π²/6)`, the Cauchy–Schwarz constant in the `ℓ¹(w)` estimate of a lift.
pub fn zeta2_sqrt() -> f64 {
    PI / 6f64.sqrt()
}

/// The arc of length `1 − δ` centred at angle 0.
pub fn a_delta(delta: f64) -> Result<ArcSet> {
    ArcSet::centered(
        &BigRational::zero(),
        &(BigRational::one() - ratio_from_f64(delta)?),
    )
}

fn exp_neg_recip(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// C^∞ step: 0 for `s ≤ 0`, 1 for `s ≥ 1`.
pub fn smooth_step(s: f64) -> f64 {
    let a = exp_neg_recip(s);
    let b = exp_neg_recip(1.0 - s);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Neumaier summation.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for &x in xs {
        let t = sum + x;
        c += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + c
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Bump {
    pub psi: BoundaryGrid,
    /// Value on the core of the complement of `A_δ`.
    pub plateau: f64,
    pub gamma: f64,
    pub delta: f64,
    pub transition: f64,
}

/// Real log-modulus `ψ` on an `m`-point grid: `log γ` on `A_δ`, a smooth
/// transition of width `transition` on each side, then a plateau chosen so
/// that the grid mean of `ψ` vanishes.
pub fn build_bump(gamma: f64, delta: f64, transition: f64, m: usize) -> Result<Bump> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Invalid(format!("γ = {gamma} outside (0, 1]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Invalid(format!("δ = {delta} outside (0, 1)")));
    }
    if !(transition > 0.0 && transition < delta / 4.0) {
        return Err(Error::Geometry(format!(
            "transition {transition} must lie in (0, δ/4 = {})",
            delta / 4.0
        )));
    }
    if m < 16 || !m.is_power_of_two() {
        return Err(Error::Invalid(format!(
            "grid size {m} must be a power of two ≥ 16"
        )));
    }
    let half = (1.0 - delta) / 2.0;
    let steps: Vec<f64> = (0..m)
        .map(|j| {
            let t = j as f64 / m as f64;
            let d = t.min(1.0 - t);
            smooth_step((d - half) / transition)
        })
        .collect();
    let mean_step = compensated_sum(&steps) / m as f64;
    if mean_step <= 0.0 {
        return Err(Error::Geometry(format!(
            "complement of A_δ holds no grid points at M = {m}"
        )));
    }
    let lg = gamma.ln();
    let shape = |h: f64| -> Vec<f64> { steps.iter().map(|s| lg + (h - lg) * s).collect() };
    let mut plateau = lg - lg / mean_step;
    // one correction step absorbs the rounding of the closed form
    plateau -= compensated_sum(&shape(plateau)) / m as f64 / mean_step;
    let psi = BoundaryGrid::from_real(shape(plateau))?;
    Ok(Bump {
        psi,
        plateau,
        gamma,
        delta,
        transition,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FFactor {
    pub series: TaylorSeries,
    /// `(Σ k²|F̂(k)|²)^{1/2}`.
    pub n_value: f64,
    /// `|1 − Ĝ(0)|` before the constant term of `F` is set to zero.
    pub f0_raw: f64,
    /// `max ||F(ζ) − 1| − γ|` over grid points of `A_δ`.
    pub arc_deviation: f64,
    pub modulus_error: f64,
    pub plateau: f64,
    pub warning: Option<String>,
}

impl FFactor {
    pub fn postconditions_hold(&self) -> bool {
        self.f0_raw <= 1e-7 && self.arc_deviation <= 1e-6
    }
}

pub fn n_value(f: &TaylorSeries) -> f64 {
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| (k as f64).powi(2) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `F = 1 − G`, `G` the outer function with `log|G| = ψ` from [`build_bump`].
/// The constant term of `F` is `1 − Ĝ(0) ≈ 0`; it is measured (`f0_raw`) and
/// then set to zero exactly.
pub fn build_f(
    gamma: f64,
    delta: f64,
    transition: f64,
    m: usize,
    degree: usize,
) -> Result<FFactor> {
    let bump = build_bump(gamma, delta, transition, m)?;
    let outer = outer_from_log_modulus(&bump.psi, degree)?;
    let mut coeffs: Vec<C64> = outer.series.coeffs().iter().map(|c| -c).collect();
    let f0_raw = (1.0 + coeffs[0]).norm();
    coeffs[0] = C64::new(0.0, 0.0);
    let series = TaylorSeries::new(coeffs)?;
    let arc_deviation = arc_deviation(&series, gamma, &a_delta(delta)?, m);
    let mut warning = outer.warning;
    if f0_raw > 1e-7 || arc_deviation > 1e-6 {
        let msg = format!(
            "F postconditions missed: |F(0)| = {f0_raw:.3e}, arc deviation = {arc_deviation:.3e}"
        );
        warning = Some(warning.map_or(msg.clone(), |w| format!("{w}; {msg}")));
    }
    Ok(FFactor {
        n_value: n_value(&series),
        series,
        f0_raw,
        arc_deviation,
        modulus_error: outer.modulus_error,
        plateau: bump.plateau,
        warning,
    })
}

fn arc_deviation(f: &TaylorSeries, gamma: f64, arc: &ArcSet, m: usize) -> f64 {
    let values = f.eval_on_circle(1.0, m);
    arc.grid_mask(m)
        .iter()
        .zip(&values)
        .filter(|(inside, _)| **inside)
        .map(|(_, v)| ((v - 1.0).norm() - gamma).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lift {
    pub m: usize,
    pub series: TaylorSeries,
    /// Preimage of `A_δ` under `ζ ↦ ζ^m`.
    pub arcs: ArcSet,
}

/// `f(z) = F(z^m)` and the preimage of `A_δ`.
pub fn lift_power(f: &TaylorSeries, m: usize, delta: f64, degree_cap: usize) -> Result<Lift> {
    if m == 0 {
        return Err(Error::Precondition("lift power must be ≥ 1".into()));
    }
    let degree = f
        .degree()
        .checked_mul(m)
        .filter(|&d| d <= degree_cap)
        .ok_or_else(|| {
            Error::DegreeCap(format!(
                "lift degree {}·{m} exceeds cap {degree_cap}",
                f.degree()
            ))
        })?;
    let mut coeffs = vec![C64::new(0.0, 0.0); degree + 1];
    for (k, &c) in f.coeffs().iter().enumerate() {
        coeffs[k * m] = c;
    }
    let arcs = ArcSet::preimage_under_power(
        &BigRational::zero(),
        &(BigRational::one() - ratio_from_f64(delta)?),
        m as u64,
    )?;
    Ok(Lift {
        m,
        series: TaylorSeries::new(coeffs)?,
        arcs,
    })
}

/// `Σ |f̂(n)| w_n`.
pub fn l1w_norm(f: &TaylorSeries, w: &WeightSequence) -> Result<f64> {
    if f.degree() > w.n_max() {
        return Err(Error::Precondition(format!(
            "degree {} beyond n_max = {}",
            f.degree(),
            w.n_max()
        )));
    }
    let weights = w.values();
    Ok(f.coeffs()
        .iter()
        .zip(&weights)
        .map(|(c, wn)| c.norm() * wn)
        .sum())
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct L1wBound {
    pub norm: f64,
    /// `w_m·√(π²/6)·N`.
    pub bound: f64,
    pub slack: f64,
}

/// Compares the norm of a lift `F(z^m)` with `w_m·√(π²/6)·N(F)`.
pub fn l1w_bound_check(norm: f64, m: usize, n_value: f64, w: &WeightSequence) -> Result<L1wBound> {
    let bound = w.extended(m)?.weight(m)? * zeta2_sqrt() * n_value;
    Ok(L1wBound {
        norm,
        bound,
        slack: bound - norm,
    })
}

/// Sum of `|f̂(n)|` over `n > d` for every `d` (suffix sums).
fn coefficient_tails(f: &TaylorSeries) -> Vec<f64> {
    let c = f.coeffs();
    let mut tails = vec![0.0; c.len()];
    for d in (0..c.len().saturating_sub(1)).rev() {
        tails[d] = tails[d + 1] + c[d + 1].norm();
    }
    tails
}

/// Truncation at the smallest `d` with `Σ_{n>d}|f̂(n)| ≤ tail_tol`; the
/// sup-norm change on the circle is at most that tail.
pub fn truncate_to_polynomials(
    f: &TaylorSeries,
    tail_tol: f64,
    degree_cap: usize,
) -> Result<TaylorSeries> {
    if !(tail_tol >= 0.0) {
        return Err(Error::Invalid(format!(
            "tail tolerance {tail_tol} must be ≥ 0"
        )));
    }
    let tails = coefficient_tails(f);
    let d = tails
        .iter()
        .position(|&t| t <= tail_tol)
        .unwrap_or(f.degree());
    if d > degree_cap {
        return Err(Error::DegreeCap(format!(
            "tail drops below {tail_tol:e} only at degree {d} > {degree_cap}"
        )));
    }
    Ok(f.truncate(d))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SAConfig {
    pub delta: f64,
    pub gamma_seq: Vec<f64>,
    pub delta_seq: Vec<f64>,
    /// Targets for `w_{m_n}·√(π²/6)·N_n`; defaults to `1/n²`.
    #[serde(default)]
    pub epsilon_seq: Option<Vec<f64>>,
    #[serde(default = "default_grid_m")]
    pub grid_m: usize,
    #[serde(default = "default_degree_cap")]
    pub degree_cap: usize,
    /// Transition width as a fraction of `δ_n`.
    #[serde(default = "default_transition_factor")]
    pub transition_factor: f64,
    /// Coefficient tail dropped from each `F_n` before lifting.
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    /// Grid on which `K` and the lifted arcs are sampled.
    #[serde(default = "default_k_grid")]
    pub k_grid: usize,
}

fn default_grid_m() -> usize {
    1 << 14
}
fn default_degree_cap() -> usize {
    1 << 20
}
fn default_transition_factor() -> f64 {
    0.125
}
fn default_tail_tol() -> f64 {
    1e-9
}
fn default_k_grid() -> usize {
    1 << 18
}

impl SAConfig {
    pub fn new(delta: f64, gamma_seq: Vec<f64>, delta_seq: Vec<f64>) -> Self {
        Self {
            delta,
            gamma_seq,
            delta_seq,
            epsilon_seq: None,
            grid_m: default_grid_m(),
            degree_cap: default_degree_cap(),
            transition_factor: default_transition_factor(),
            tail_tol: default_tail_tol(),
            k_grid: default_k_grid(),
        }
    }

    pub fn epsilons(&self) -> Vec<f64> {
        match &self.epsilon_seq {
            Some(e) => e.clone(),
            None => (1..=self.gamma_seq.len())
                .map(|n| 1.0 / (n * n) as f64)
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Invalid(msg));
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("δ = {} outside (0, 1)", self.delta));
        }
        let n = self.gamma_seq.len();
        if n == 0 || self.delta_seq.len() != n || self.epsilons().len() != n {
            return bad(
                "gamma_seq, delta_seq and epsilon_seq must be nonempty and of equal length".into(),
            );
        }
        for (i, &g) in self.gamma_seq.iter().enumerate() {
            if g == 1.0 {
                return bad(format!(
                    "γ_{} = 1 is inadmissible: F ≡ 0 cannot approximate 1",
                    i + 1
                ));
            }
            if !(g > 0.0 && g < 1.0) {
                return bad(format!("γ_{} = {g} outside (0, 1)", i + 1));
            }
        }
        if self.delta_seq.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
            return bad("every δ_n must lie in (0, 1)".into());
        }
        if self.epsilons().iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return bad("every ε_n must be positive".into());
        }
        let total = self
            .delta_seq
            .iter()
            .map(|&d| ratio_from_f64(d))
            .sum::<Result<BigRational>>()?;
        if total > ratio_from_f64(self.delta)? {
            return bad(format!("Σ δ_n = {total} exceeds δ = {}", self.delta));
        }
        if self.grid_m < 64 || !self.grid_m.is_power_of_two() {
            return bad(format!(
                "grid_m = {} must be a power of two ≥ 64",
                self.grid_m
            ));
        }
        if self.k_grid < self.grid_m || !self.k_grid.is_power_of_two() {
            return bad(format!(
                "k_grid = {} must be a power of two ≥ grid_m",
                self.k_grid
            ));
        }
        if self.degree_cap < self.grid_m {
            return bad(format!("degree cap {} below grid_m", self.degree_cap));
        }
        if !(self.transition_factor > 0.0 && self.transition_factor < 0.25) {
            return bad(format!(
                "transition factor {} outside (0, 1/4)",
                self.transition_factor
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageRecord {
    pub n: usize,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub m: usize,
    pub n_value: f64,
    pub f_degree: usize,
    pub lift_degree: usize,
    pub f0_raw: f64,
    pub arc_deviation: f64,
    pub l1w_norm: f64,
    pub l1w_bound: f64,
    pub l1w_slack: f64,
    /// `max |f_n − 1|` over `K`-grid points.
    pub sup_k_dev: f64,
    /// `max ||f_n − 1| − γ_n|` over grid points of the lifted arcs.
    pub sup_e_dev: f64,
    pub k_measure: f64,
    pub k_measure_exact: String,
    pub k_grid_points: usize,
    pub warning: Option<String>,
}

impl StageRecord {
    pub fn l1w_ok(&self) -> bool {
        self.l1w_norm <= self.epsilon
    }

    pub fn sup_ok(&self) -> bool {
        self.sup_k_dev <= self.gamma + 1e-5
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SAWitness {
    pub k: ArcSet,
    pub stages: Vec<StageRecord>,
    #[serde(skip)]
    pub lifts: Vec<Lift>,
    /// `measure(K) ≥ 1 − δ`, decided exactly.
    pub measure_ok: bool,
}

impl SAWitness {
    pub fn all_hold(&self) -> bool {
        self.measure_ok
            && self
                .stages
                .iter()
                .all(|s| s.l1w_ok() && s.sup_ok() && s.l1w_slack >= 0.0)
    }
}

/// Smallest `m ≥ 1` with `w_m·c·N ≤ ε`: doubling, then bisection.
fn smallest_power(w: &WeightSequence, c_n: f64, epsilon: f64) -> Result<usize> {
    const SEARCH_LIMIT: usize = 1 << 60;
    let ok = |m: usize| -> Result<bool> { Ok(w.extended(m)?.weight(m)? * c_n <= epsilon) };
    if ok(1)? {
        return Ok(1);
    }
    let mut hi = 2;
    while !ok(hi)? {
        if hi >= SEARCH_LIMIT {
            return Err(Error::Resource(format!(
                "no m ≤ 2^60 achieves w_m·{c_n:.3e} ≤ {epsilon:.3e}"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Runs the stages sequentially; `K` is the running intersection of the
/// lifted arcs. Grid scans inside a stage are parallel.
pub fn sa_pipeline(w: &WeightSequence, config: &SAConfig) -> Result<SAWitness> {
    config.validate()?;
    let eps = config.epsilons();
    let c = zeta2_sqrt();
    let mk = config.k_grid;
    let mut k = ArcSet::full();
    let mut stages = Vec::new();
    let mut lifts = Vec::new();
    let mut w = w.clone();
    for (i, (&gamma, &delta)) in config.gamma_seq.iter().zip(&config.delta_seq).enumerate() {
        let n = i + 1;
        let factor = build_f(
            gamma,
            delta,
            delta * config.transition_factor,
            config.grid_m,
            config.grid_m / 4,
        )?;
        let f = truncate_to_polynomials(&factor.series, config.tail_tol, config.degree_cap)?;
        let nv = n_value(&f);
        let m = smallest_power(&w, c * nv, eps[i]).map_err(|e| match e {
            Error::Resource(msg) => Error::Resource(format!("stage {n}: {msg}")),
            other => other,
        })?;
        let lift_degree = m.checked_mul(f.degree()).unwrap_or(usize::MAX);
        if lift_degree > config.degree_cap {
            return Err(Error::Resource(format!(
                "stage {n}: N = {nv:.4e} needs m ≥ {m}, lift degree {lift_degree} exceeds cap {}",
                config.degree_cap
            )));
        }
        if lift_degree > w.n_max() {
            w = w.extended(lift_degree)?;
        }
        let lift = lift_power(&f, m, delta, config.degree_cap)?;
        k = k.intersect(&lift.arcs);

        let norm = l1w_norm(&lift.series, &w)?;
        let bound = l1w_bound_check(norm, m, nv, &w)?;
        // f_n(ζ_j) = F(ζ_j^m): values of F on the fine grid, read at j·m mod M_K
        let f_vals = f.eval_on_circle(1.0, mk);
        let at = |j: usize| f_vals[(j as u128 * m as u128 % mk as u128) as usize];
        let k_mask = k.grid_mask(mk);
        let e_mask = lift.arcs.grid_mask(mk);
        let (sup_k, count) = (0..mk)
            .into_par_iter()
            .filter(|&j| k_mask[j])
            .map(|j| ((at(j) - 1.0).norm(), 1usize))
            .reduce(|| (f64::NEG_INFINITY, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
        let sup_e = (0..mk)
            .into_par_iter()
            .filter(|&j| e_mask[j])
            .map(|j| ((at(j) - 1.0).norm() - gamma).abs())
            .reduce(|| 0.0, f64::max);
        let measure = k.measure();
        stages.push(StageRecord {
            n,
            gamma,
            delta,
            epsilon: eps[i],
            m,
            n_value: nv,
            f_degree: f.degree(),
            lift_degree: lift.series.degree(),
            f0_raw: factor.f0_raw,
            arc_deviation: factor.arc_deviation,
            l1w_norm: norm,
            l1w_bound: bound.bound,
            l1w_slack: bound.slack,
            sup_k_dev: if count == 0 { f64::NAN } else { sup_k },
            sup_e_dev: sup_e,
            k_measure: rational_to_f64(&measure),
            k_measure_exact: measure.to_string(),
            k_grid_points: count,
            warning: factor.warning.clone(),
        });
        lifts.push(lift);
    }
    let measure_ok = k.measure() >= BigRational::one() - ratio_from_f64(config.delta)?;
    Ok(SAWitness {
        k,
        stages,
        lifts,
        measure_ok,
    })
}

fn rational_to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairingReport {
    pub m: usize,
    /// `Σ_j conj(f̂(j+m))·μ̂(j)`.
    pub coefficient_value: C64,
    /// `∫ conj(S^m f) dμ` by quadrature against the atoms and density cells.
    pub quadrature_value: C64,
    pub value: f64,
    pub agreement: f64,
    pub l1w_norm: f64,
    /// `sup_{j ≤ D} |μ̂(j)|/w_j`, `D = deg f − m`.
    pub mu_ratio: f64,
    /// `‖f‖_{ℓ¹(w)}·mu_ratio`.
    pub bound: f64,
    /// `Σ_j |f̂(j+m)| w_j · mu_ratio`; equals `bound` when `m = 0`.
    pub shifted_bound: f64,
}

/// Both computations of the pairing `∫ conj(f(ζ)ζ^{−m}) dμ` against a
/// measure carried by `k`, with the `ℓ¹(w)` estimate.
pub fn pairing_annihilation_demo(
    mu: &BoundaryMeasure,
    f: &TaylorSeries,
    w: &WeightSequence,
    m: usize,
    k: &ArcSet,
) -> Result<PairingReport> {
    for a in mu.atoms() {
        if !k.contains_f64(a.theta) {
            return Err(Error::Precondition(format!(
                "atom at θ = {} lies outside K",
                a.theta
            )));
        }
    }
    if let Some(d) = mu.density() {
        let mask = k.grid_mask(d.len());
        if d.iter().zip(&mask).any(|(x, inside)| *x != 0.0 && !inside) {
            return Err(Error::Precondition("density support leaves K".into()));
        }
    }
    let shifted: Vec<C64> = f.coeffs().iter().skip(m).copied().collect();
    let shifted = TaylorSeries::new(shifted)?;
    let d_max = shifted.degree();
    let w = w.extended(f.degree().max(d_max))?;
    let weights = w.values();

    let mu_hat = mu.fourier_coeffs(d_max);
    let coefficient_value: C64 = shifted
        .coeffs()
        .iter()
        .zip(&mu_hat)
        .map(|(c, h)| c.conj() * h)
        .sum();

    let mut quadrature_value: C64 = mu
        .atoms()
        .iter()
        .map(|a| a.weight * shifted.eval(a.point()).conj())
        .sum();
    if let Some(d) = mu.density() {
        let vals = shifted.eval_on_circle(1.0, d.len());
        quadrature_value +=
            vals.iter().zip(d).map(|(v, x)| v.conj() * *x).sum::<C64>() / d.len() as f64;
    }

    let mu_ratio = mu_hat
        .iter()
        .zip(&weights)
        .map(|(h, wj)| h.norm() / wj)
        .fold(0.0, f64::max);
    if !mu_ratio.is_finite() {
        return Err(Error::Precondition(
            "sup |μ̂(j)|/w_j is not finite over the computed range".into(),
        ));
    }
    let l1w = l1w_norm(f, &w)?;
    let shifted_l1w: f64 = shifted
        .coeffs()
        .iter()
        .zip(&weights)
        .map(|(c, wj)| c.norm() * wj)
        .sum();
    Ok(PairingReport {
        m,
        value: coefficient_value.norm(),
        agreement: (coefficient_value - quadrature_value).norm(),
        coefficient_value,
        quadrature_value,
        l1w_norm: l1w,
        mu_ratio,
        bound: l1w * mu_ratio,
        shifted_bound: shifted_l1w * mu_ratio,
    })
}

/// `δ_θ − δ_{θ+gap}` scaled so that `sup_{j ≤ d_max} |μ̂(j)|/w_j = 1`.
pub fn normalized_two_atom(
    theta: f64,
    gap: f64,
    w: &WeightSequence,
    d_max: usize,
) -> Result<BoundaryMeasure> {
    let w = w.extended(d_max)?;
    let weights = w.values();
    let raw = (0..=d_max)
        .map(|j| {
            let a = fft::turn(-frac_part(j as f64 * theta));
            let b = fft::turn(-frac_part(j as f64 * (theta + gap)));
            (a - b).norm() / weights[j]
        })
        .fold(0.0, f64::max);
    if !(raw > 0.0 && raw.is_finite()) {
        return Err(Error::Range(format!(
            "two-atom normalisation {raw} unusable"
        )));
    }
    let s = 1.0 / raw;
    BoundaryMeasure::from_atoms(vec![
        crate::analytic::Atom::new(theta, s),
        crate::analytic::Atom::new(theta + gap, -s),
    ])
}

fn frac_part(x: f64) -> f64 {
    x - x.floor()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_mean_and_arc_value() {
        let b = build_bump(0.5, 0.2, 0.02, 4096).unwrap();
        let mean = compensated_sum(&b.psi.real_parts()) / 4096.0;
        assert!(mean.abs() < 1e-14, "{mean}");
        let mask = a_delta(0.2).unwrap().grid_mask(4096);
        for (v, inside) in b.psi.samples().iter().zip(mask) {
            if inside {
                assert_eq!(v.re, 0.5f64.ln());
            }
        }
        let flat = build_bump(1.0, 0.3, 0.05, 256).unwrap();
        assert!(flat.psi.samples().iter().all(|v| v.re == 0.0) && flat.plateau == 0.0);
        assert!(build_bump(0.1, 0.5, 0.05, 1024).unwrap().plateau > 0.0);
        assert!(matches!(
            build_bump(0.5, 0.2, 0.06, 256),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn smooth_step_shape() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        assert!(smooth_step(0.3) < smooth_step(0.31));
    }

    #[test]
    fn f_factor() {
        let f = build_f(0.5, 0.2, 0.025, 4096, 1024).unwrap();
        assert!(
            f.postconditions_hold(),
            "{f:?}",
            f = (f.f0_raw, f.arc_deviation, &f.warning)
        );
        assert_eq!(f.series.coeff(0), C64::new(0.0, 0.0));
        let trivial = build_f(1.0, 0.2, 0.025, 256, 64).unwrap();
        assert!(
            trivial.series.coeffs().iter().all(|c| c.norm() < 1e-15) && trivial.n_value < 1e-13
        );
    }

    #[test]
    fn n_grows_as_delta_shrinks() {
        let mut last = 0.0;
        for delta in [0.4, 0.2, 0.1] {
            let f = build_f(0.5, delta, delta / 8.0, 8192, 2048).unwrap();
            assert!(f.n_value > last, "δ = {delta}");
            last = f.n_value;
        }
    }

    #[test]
    fn lifts() {
        let z = TaylorSeries::monomial(1, C64::new(1.0, 0.0));
        let l = lift_power(&z, 3, 0.25, 100).unwrap();
        assert_eq!(l.series, TaylorSeries::monomial(3, C64::new(1.0, 0.0)));
        assert_eq!(l.arcs.measure(), ratio(3, 4));
        let one = lift_power(&z, 1, 0.25, 100).unwrap();
        assert_eq!(one.arcs, a_delta(0.25).unwrap());
        assert!(matches!(
            lift_power(&z, 200, 0.25, 100),
            Err(Error::DegreeCap(_))
        ));

        let f = build_f(0.5, 0.2, 0.025, 4096, 1024).unwrap();
        let l = lift_power(&f.series, 16, 0.2, 1 << 20).unwrap();
        let mk = 1 << 16;
        let vals = l.series.eval_on_circle(1.0, mk);
        let dev = l
            .arcs
            .grid_mask(mk)
            .iter()
            .zip(&vals)
            .filter(|(i, _)| **i)
            .map(|(_, v)| ((v - 1.0).norm() - 0.5).abs())
            .fold(0.0, f64::max);
        assert!(dev <= 1e-6, "{dev}");
    }

    #[test]
    fn l1w_examples() {
        let w = WeightSequence::geometric(0.5, 64).unwrap();
        assert_eq!(l1w_norm(&TaylorSeries::zero(), &w).unwrap(), 0.0);
        let z5 = TaylorSeries::monomial(5, C64::new(1.0, 0.0));
        assert_eq!(l1w_norm(&z5, &w).unwrap(), 1.0 / 32.0);

        let f = build_f(0.5, 0.2, 0.025, 4096, 1024).unwrap();
        let w = WeightSequence::power(2.0, 0.25, 1 << 17).unwrap();
        let l = lift_power(&f.series, 64, 0.2, 1 << 20).unwrap();
        let b = l1w_bound_check(l1w_norm(&l.series, &w).unwrap(), 64, f.n_value, &w).unwrap();
        assert!(b.slack >= 0.0, "{b:?}");
    }

    #[test]
    fn truncation() {
        let geo =
            TaylorSeries::from_real(&(0..60).map(|n| 0.5f64.powi(n)).collect::<Vec<_>>()).unwrap();
        assert_eq!(
            truncate_to_polynomials(&geo, 1e-3, 100).unwrap().degree(),
            10
        );
        assert!(truncate_to_polynomials(&geo, 1e-3, 5).is_err());
        let p = TaylorSeries::from_real(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(truncate_to_polynomials(&p, 0.0, 10).unwrap(), p);

        let f = build_f(0.5, 0.2, 0.025, 4096, 1024).unwrap();
        let l = lift_power(&f.series, 64, 0.2, 1 << 20).unwrap();
        assert_eq!(
            truncate_to_polynomials(&l.series, 1e-6, 1 << 20)
                .unwrap()
                .degree()
                % 64,
            0
        );
    }

    #[test]
    fn config_rejects_gamma_one() {
        let c = SAConfig::new(0.1, vec![1.0], vec![0.05]);
        assert!(c.validate().is_err());
        let over = SAConfig::new(0.1, vec![0.5, 0.25], vec![0.06, 0.06]);
        assert!(over.validate().is_err());
    }

    #[test]
    fn fast_weights_give_small_powers() {
        let w = WeightSequence::geometric(0.5, 1000).unwrap();
        let mut cfg = SAConfig::new(0.5, vec![0.5], vec![0.4]);
        cfg.grid_m = 4096;
        cfg.k_grid = 1 << 16;
        let wit = sa_pipeline(&w, &cfg).unwrap();
        let s = &wit.stages[0];
        let expect = (zeta2_sqrt() * s.n_value / s.epsilon).log2().ceil() as usize;
        assert_eq!(s.m, expect.max(1));
        assert!(wit.all_hold(), "{:?}", wit.stages);
    }

    #[test]
    fn zero_measure_pairing() {
        let w = WeightSequence::geometric(0.5, 100).unwrap();
        let f = TaylorSeries::from_real(&[1.0, 2.0]).unwrap();
        let r = pairing_annihilation_demo(&BoundaryMeasure::zero(), &f, &w, 0, &ArcSet::full())
            .unwrap();
        assert_eq!((r.value, r.bound), (0.0, 0.0));
        let outside = BoundaryMeasure::atom(0.5, 1.0).unwrap();
        assert!(pairing_annihilation_demo(&outside, &f, &w, 0, &a_delta(0.2).unwrap()).is_err());
    }
}
