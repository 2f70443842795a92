//! Model spaces `K_Θ = H² ⊖ ΘH²` of finite Blaschke products, the
//! cyclicity/model-space duality at finite rank, and the outer function
//! `b` with `1 − |b|² = (1 − e^{−2})·1_K` paired against SA polynomials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    series_divide, toeplitz_conj_apply, BoundaryGrid, BoundaryMeasure, TaylorSeries,
};
use crate::innerouter::outer_from_log_modulus;
use crate::orlicz::{conjugate_function, orlicz_norm, YoungFunction};
use crate::saconstruct::{l1w_norm, ArcSet, WeightSequence};
use crate::{Error, Result, C64};

const SAME_ZERO_TOL: f64 = 1e-12;
const MAX_MULTIPLICITY: usize = 3;

fn zero_c() -> C64 {
    C64::new(0.0, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct FiniteBlaschke {
    zeros: Vec<C64>,
}

impl TryFrom<Vec<C64>> for FiniteBlaschke {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FiniteBlaschke> for Vec<C64> {
    fn from(b: FiniteBlaschke) -> Self {
        b.zeros
    }
}

impl FiniteBlaschke {
    pub fn new(zeros: Vec<C64>) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::Invalid(
                "a Blaschke product needs at least one zero".into(),
            ));
        }
        if let Some(z) = zeros.iter().find(|z| !(z.norm() < 1.0)) {
            return Err(Error::Domain(format!("zero {z} is not inside the disc")));
        }
        Ok(Self { zeros })
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// `Π (|a|/a)(a − z)/(1 − āz)`, with the factor `z` for `a = 0`.
    pub fn eval(&self, z: C64) -> C64 {
        self.zeros.iter().map(|&a| factor(a, z)).product()
    }

    pub fn series(&self, degree: usize) -> TaylorSeries {
        self.zeros
            .iter()
            .fold(TaylorSeries::constant(C64::new(1.0, 0.0)), |acc, &a| {
                acc.mul(&factor_series(a, degree), degree)
            })
    }

    /// `max ||Θ| − 1|` on the `m`-point boundary grid.
    pub fn boundary_modulus_error(&self, m: usize) -> f64 {
        (0..m)
            .map(|j| {
                (self
                    .eval(crate::analytic::fft::root_of_unity(j as i64, m))
                    .norm()
                    - 1.0)
                    .abs()
            })
            .fold(0.0, f64::max)
    }

    /// Distinct zeros with multiplicities.
    fn grouped(&self) -> Result<Vec<(C64, usize)>> {
        let mut groups: Vec<(C64, usize)> = Vec::new();
        for &z in &self.zeros {
            match groups
                .iter_mut()
                .find(|(a, _)| (a - z).norm() <= SAME_ZERO_TOL)
            {
                Some(g) => g.1 += 1,
                None => groups.push((z, 1)),
            }
        }
        if let Some((a, k)) = groups.iter().find(|(_, k)| *k > MAX_MULTIPLICITY) {
            return Err(Error::Unsupported(format!(
                "zero {a} has multiplicity {k} > {MAX_MULTIPLICITY}"
            )));
        }
        Ok(groups)
    }
}

fn factor(a: C64, z: C64) -> C64 {
    if a == zero_c() {
        z
    } else {
        (a.norm() / a) * (a - z) / (1.0 - a.conj() * z)
    }
}

fn factor_series(a: C64, degree: usize) -> TaylorSeries {
    if a == zero_c() {
        return TaylorSeries::monomial(1, C64::new(1.0, 0.0)).truncate(degree);
    }
    // (|a|/a)(a − z)Σ(āz)ⁿ: coefficient 0 is |a|, then −(|a|/a)(1 − |a|²)ā^{n−1}
    let u = a.norm() / a;
    let ab = a.conj();
    let mut coeffs = Vec::with_capacity(degree + 1);
    coeffs.push(C64::new(a.norm(), 0.0));
    let mut p = C64::new(1.0, 0.0);
    for _ in 1..=degree {
        coeffs.push(-u * (1.0 - a.norm_sqr()) * p);
        p *= ab;
    }
    TaylorSeries::new(coeffs).expect("finite coefficients")
}

/// `z^r/(1 − āz)^{r+1}` for each zero `a` and `r` below its multiplicity.
pub fn reproducing_kernels(theta: &FiniteBlaschke, degree: usize) -> Result<Vec<TaylorSeries>> {
    let mut out = Vec::with_capacity(theta.degree());
    for (a, mult) in theta.grouped()? {
        let ab = a.conj();
        for r in 0..mult {
            // coefficient n: C(n, r)·ā^{n−r}
            let mut coeffs = vec![zero_c(); degree + 1];
            let mut p = C64::new(1.0, 0.0);
            let mut binom = 1.0;
            for n in r..=degree {
                if n > r {
                    binom = binom * n as f64 / (n - r) as f64;
                }
                coeffs[n] = p * binom;
                p *= ab;
            }
            out.push(TaylorSeries::new(coeffs)?);
        }
    }
    Ok(out)
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelBasis {
    pub basis: Vec<TaylorSeries>,
    /// `max |⟨e, Θz^k⟩|` over basis elements and `k ≤ degree − d`.
    pub orthogonality_residual: f64,
    /// `max |G − I|` for the Gram matrix of the basis.
    pub gram_residual: f64,
}

/// Orthonormalised reproducing kernels (two passes of modified Gram–Schmidt).
pub fn model_space_basis(theta: &FiniteBlaschke, degree: usize) -> Result<ModelBasis> {
    let d = theta.degree();
    if degree < d {
        return Err(Error::Precondition(format!(
            "degree {degree} below the number of zeros {d}"
        )));
    }
    let mut vecs: Vec<Vec<C64>> = reproducing_kernels(theta, degree)?
        .into_iter()
        .map(TaylorSeries::into_coeffs)
        .collect();
    for _ in 0..2 {
        for i in 0..vecs.len() {
            for j in 0..i {
                let c = inner(&vecs[i], &vecs[j]);
                let (head, tail) = vecs.split_at_mut(i);
                tail[0]
                    .iter_mut()
                    .zip(&head[j])
                    .for_each(|(x, y)| *x -= c * y);
            }
            let n = inner(&vecs[i], &vecs[i]).re.sqrt();
            if !(n > 1e-13) {
                return Err(Error::Range(format!(
                    "kernels are numerically dependent at degree {degree}"
                )));
            }
            vecs[i].iter_mut().for_each(|x| *x /= n);
        }
    }
    let th = theta.series(degree);
    let mut orth: f64 = 0.0;
    for e in &vecs {
        for k in 0..=degree - d {
            let shifted = th.shift_up(k).truncate(degree);
            orth = orth.max(inner(e, shifted.coeffs()).norm());
        }
    }
    let mut gram: f64 = 0.0;
    for (i, a) in vecs.iter().enumerate() {
        for (j, b) in vecs.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            gram = gram.max((inner(a, b) - target).norm());
        }
    }
    Ok(ModelBasis {
        basis: vecs
            .into_iter()
            .map(TaylorSeries::new)
            .collect::<Result<_>>()?,
        orthogonality_residual: orth,
        gram_residual: gram,
    })
}

pub const DUALCYC_RESTARTS: usize = 20;
pub const DUALCYC_SEED: u64 = 0x5eed_0f_d0a1;
pub const CD_TOL: f64 = 1e-8;
const CD_MAX_SWEEPS: usize = 500;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualcycReport {
    /// `min_Q ‖1 − ΘQ‖_{Φ*} / ‖1‖_{Φ*}`.
    pub dist: f64,
    /// `min {‖f‖_Φ : f ∈ K_Θ, f̂(0) = 1} / ‖1‖_Φ`.
    pub min_norm: f64,
    /// `dist·min_norm`; the Hölder inequality for Luxemburg norms keeps it in `[1/2, 1]`.
    pub product: f64,
    pub restarts: usize,
    pub seed: u64,
    pub dist_converged: bool,
    pub min_converged: bool,
    pub sweeps: usize,
}

/// One-dimensional minimisation of a convex function along `t ∈ ℝ`:
/// expanding bracket around 0, then golden-section search.
fn line_min(f: impl Fn(f64) -> f64, h0: f64) -> (f64, f64) {
    let f0 = f(0.0);
    let mut h = h0;
    let (mut lo, mut hi);
    let (fp, fm) = (f(h), f(-h));
    if fp >= f0 && fm >= f0 {
        lo = -h;
        hi = h;
    } else {
        let dir = if fp < fm { 1.0 } else { -1.0 };
        let mut prev = f0;
        let mut cur = f(dir * h);
        let mut last = 0.0;
        while cur < prev && h < 1e12 {
            prev = cur;
            last = h;
            h *= 2.0;
            cur = f(dir * h);
        }
        let (a, b) = (dir * (last / 2.0), dir * h);
        lo = a.min(b);
        hi = a.max(b);
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let (x, fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if fx < f0 {
        (x, fx)
    } else {
        (0.0, f0)
    }
}

/// Distance from 1 to `Θ·(polynomials of degree ≤ N − d)` in `ℓ^{Φ*}` and the
/// minimal `ℓ^Φ` norm on `K_Θ` under `f̂(0) = 1`, everything truncated at `N`.
pub fn dualcyc_gap(
    theta: &FiniteBlaschke,
    phi: &YoungFunction,
    trunc_n: usize,
) -> Result<DualcycReport> {
    let d = theta.degree();
    if trunc_n < 4 * d {
        return Err(Error::Precondition(format!(
            "truncation {trunc_n} below 4·d = {}",
            4 * d
        )));
    }
    let conj = conjugate_function(phi)?;
    let e0 = [C64::new(1.0, 0.0)];
    let (dist, dist_converged, sweeps) = distance_to_shifts(theta, &conj, trunc_n);
    let dist = dist / orlicz_norm(&e0, &conj);
    let (min_raw, min_converged) = min_model_norm(theta, phi, trunc_n)?;
    let min_norm = min_raw / orlicz_norm(&e0, phi);
    Ok(DualcycReport {
        dist,
        min_norm,
        product: dist * min_norm,
        restarts: DUALCYC_RESTARTS,
        seed: DUALCYC_SEED,
        dist_converged,
        min_converged,
        sweeps,
    })
}

/// Coordinate descent over real and imaginary parts of `Q`, warm-started
/// at the `H²` projection `Q = conj(Θ(0))`.
fn distance_to_shifts(
    theta: &FiniteBlaschke,
    conj: &YoungFunction,
    n: usize,
) -> (f64, bool, usize) {
    let d = theta.degree();
    let th = theta.series(n);
    let th = th.coeffs();
    let len_q = n - d + 1;
    let mut r = vec![zero_c(); n + 1];
    r[0] = C64::new(1.0, 0.0);
    let q0 = th[0].conj();
    for (i, t) in th.iter().enumerate() {
        r[i] -= q0 * t;
    }
    let norm = |r: &[C64]| orlicz_norm(r, conj);
    let mut j = norm(&r);
    let mut step = vec![1e-2f64; 2 * len_q];
    for sweep in 1..=CD_MAX_SWEEPS {
        let j_start = j;
        for k in 0..len_q {
            for (s, dir) in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)]
                .into_iter()
                .enumerate()
            {
                let col = |i: usize| {
                    if i >= k {
                        th.get(i - k).copied().unwrap_or_default() * dir
                    } else {
                        zero_c()
                    }
                };
                let phi_t = |t: f64| {
                    let trial: Vec<C64> = r
                        .iter()
                        .enumerate()
                        .map(|(i, ri)| ri - col(i) * t)
                        .collect();
                    norm(&trial)
                };
                let (t, v) = line_min(phi_t, step[2 * k + s].max(1e-8));
                if t != 0.0 {
                    r.iter_mut()
                        .enumerate()
                        .for_each(|(i, ri)| *ri -= col(i) * t);
                    step[2 * k + s] = t.abs();
                    j = v;
                }
            }
        }
        if j_start - j <= CD_TOL * j_start {
            return (j, true, sweep);
        }
    }
    (j, false, CD_MAX_SWEEPS)
}

/// Projected gradient on `{c : Σ c_i ê_i(0) = 1}` in basis coordinates,
/// best of [`DUALCYC_RESTARTS`] seeded starts.
fn min_model_norm(theta: &FiniteBlaschke, phi: &YoungFunction, n: usize) -> Result<(f64, bool)> {
    let basis = model_space_basis(theta, n)?.basis;
    let dim = basis.len();
    let a: Vec<C64> = basis.iter().map(|e| e.coeff(0)).collect();
    let a2: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    if !(a2 > 0.0) {
        return Err(Error::Range("every basis element vanishes at 0".into()));
    }
    // constraint: Σ c_i a_i = 1; projection c ← c + (1 − a·c)·ā/|a|²
    let project = |c: &mut [C64]| {
        let s: C64 = c.iter().zip(&a).map(|(x, y)| x * y).sum();
        let corr = (C64::new(1.0, 0.0) - s) / a2;
        c.iter_mut()
            .zip(&a)
            .for_each(|(x, y)| *x += corr * y.conj());
    };
    let objective = |c: &[C64]| {
        let mut f = vec![zero_c(); n + 1];
        for (ci, e) in c.iter().zip(&basis) {
            f.iter_mut().zip(e.coeffs()).for_each(|(x, y)| *x += ci * y);
        }
        orlicz_norm(&f, phi)
    };
    let run = |restart: usize| -> (f64, bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(DUALCYC_SEED.wrapping_add(restart as u64));
        let mut c: Vec<C64> = if restart == 0 {
            a.iter().map(|x| x.conj() / a2).collect()
        } else {
            (0..dim)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        project(&mut c);
        if dim == 1 {
            return (objective(&c), true);
        }
        let mut val = objective(&c);
        let mut lr = 0.1;
        for _ in 0..2000 {
            let h = 1e-6;
            let mut grad = vec![zero_c(); dim];
            for i in 0..dim {
                for (part, unit) in [(0, C64::new(1.0, 0.0)), (1, C64::new(0.0, 1.0))] {
                    let mut cp = c.clone();
                    let mut cm = c.clone();
                    cp[i] += unit * h;
                    cm[i] -= unit * h;
                    let g = (objective(&cp) - objective(&cm)) / (2.0 * h);
                    if part == 0 {
                        grad[i].re = g;
                    } else {
                        grad[i].im = g;
                    }
                }
            }
            // tangent projection: remove the component along ā
            let s: C64 = grad.iter().zip(&a).map(|(x, y)| x * y).sum::<C64>() / a2;
            grad.iter_mut()
                .zip(&a)
                .for_each(|(g, y)| *g -= s * y.conj());
            let gnorm: f64 = grad.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
            if gnorm < 1e-9 {
                return (val, true);
            }
            let mut accepted = false;
            while lr > 1e-14 {
                let mut trial: Vec<C64> = c.iter().zip(&grad).map(|(x, g)| x - g * lr).collect();
                project(&mut trial);
                let tv = objective(&trial);
                if tv < val - 1e-4 * lr * gnorm * gnorm {
                    let gain = val - tv;
                    c = trial;
                    val = tv;
                    lr *= 2.0;
                    accepted = true;
                    if gain <= CD_TOL * val {
                        return (val, true);
                    }
                    break;
                }
                lr *= 0.5;
            }
            if !accepted {
                return (val, true);
            }
        }
        (val, false)
    };
    let results: Vec<(f64, bool)> = (0..DUALCYC_RESTARTS).into_par_iter().map(run).collect();
    let best = results
        .iter()
        .copied()
        .reduce(|x, y| if y.0 < x.0 { y } else { x })
        .expect("at least one restart");
    Ok(best)
}

pub const COLLAR_CELLS: usize = 16;
const SMOOTHING_HALF_WIDTH: i64 = 2;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DbrStage {
    pub n: usize,
    pub l1w_norm: f64,
    /// `|∫ conj(f_n) dμ|`, tending to `|μ(𝕋)|`.
    pub pairing: f64,
    /// `|∫ conj(f_n − 1) dμ|`.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DbrReport {
    pub grid_m: usize,
    pub b_degree: usize,
    pub trunc: usize,
    pub collar_cells: usize,
    /// `max |1 − |b|² − (1 − e^{−2})·1_K|` on grid points at least
    /// `collar_cells` away from `∂K`.
    pub modulus_defect: f64,
    pub b0: f64,
    pub b0_expected: f64,
    /// `‖g − T_b̄ T_{1/b̄} g‖_∞` over coefficients, relative to `‖g‖_∞`.
    pub toeplitz_residual: f64,
    pub g_norm: f64,
    pub mu_mass: f64,
    pub stages: Vec<DbrStage>,
}

/// Cell-averaged indicator: `M·|K ∩ [j − ½, j + ½]/M|`.
fn cell_indicator(k: &ArcSet, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    let mf = m as f64;
    for [s, e] in k.to_f64() {
        let (u, v) = (s * mf + 0.5, e * mf + 0.5);
        let (mut cell, last) = (u.floor() as i64, v.floor() as i64);
        while cell <= last {
            let lo = u.max(cell as f64);
            let hi = v.min(cell as f64 + 1.0);
            if hi > lo {
                out[cell.rem_euclid(m as i64) as usize] += hi - lo;
            }
            cell += 1;
        }
    }
    out
}

fn smooth_circular(x: &[f64]) -> Vec<f64> {
    let hw = SMOOTHING_HALF_WIDTH;
    let w: Vec<f64> = (-hw..=hw)
        .map(|j| 1.0 + (std::f64::consts::PI * j as f64 / (hw + 1) as f64).cos())
        .collect();
    let total: f64 = w.iter().sum();
    let m = x.len() as i64;
    (0..m)
        .map(|i| {
            (-hw..=hw)
                .zip(&w)
                .map(|(j, wj)| wj * x[(i + j).rem_euclid(m) as usize])
                .sum::<f64>()
                / total
        })
        .collect()
}

/// Grid points at distance `> collar` cells from every change of `mask`.
fn far_from_boundary(mask: &[bool], collar: usize) -> Vec<bool> {
    let m = mask.len();
    let c = collar as i64;
    (0..m as i64)
        .map(|i| (-c..=c).all(|j| mask[(i + j).rem_euclid(m as i64) as usize] == mask[i as usize]))
        .collect()
}

/// The outer `b` with `log|b| = −1_K` (smoothed over a few cells), the
/// Toeplitz chain `g = T_b̄ T_{1/b̄} g` for `g = 𝒦(h(1 − |b|²)1_K dm)` with
/// `h = 1`, and pairings of the measure `(1 − |b|²)1_K dm` with `f_seq`.
pub fn dbr_pairing_demo(
    k: &ArcSet,
    f_seq: &[TaylorSeries],
    w: &WeightSequence,
    grid_m: usize,
    trunc: usize,
) -> Result<DbrReport> {
    if f_seq.is_empty() {
        return Err(Error::Precondition("no SA polynomials supplied".into()));
    }
    if grid_m < 256 || !grid_m.is_power_of_two() {
        return Err(Error::Invalid(format!(
            "grid size {grid_m} must be a power of two ≥ 256"
        )));
    }
    if trunc == 0 || trunc >= grid_m / 2 {
        return Err(Error::Precondition(format!(
            "truncation {trunc} must lie in [1, M/2)"
        )));
    }
    let mask = k.grid_mask(grid_m);
    let interior = far_from_boundary(&mask, COLLAR_CELLS);
    let has_in = mask.iter().zip(&interior).any(|(m, i)| *m && *i);
    let has_out = mask.iter().zip(&interior).any(|(m, i)| !*m && *i);
    let k_full = mask.iter().all(|&m| m);
    if !has_in || (!k_full && !has_out) {
        return Err(Error::Resource(format!(
            "M = {grid_m} leaves no grid point {COLLAR_CELLS} cells away from ∂K"
        )));
    }
    let psi: Vec<f64> = smooth_circular(&cell_indicator(k, grid_m))
        .iter()
        .map(|x| -x)
        .collect();
    let b_degree = grid_m / 2 - 1;
    let b = outer_from_log_modulus(&BoundaryGrid::from_real(psi)?, b_degree)?.series;
    let vals = b.eval_on_circle(1.0, grid_m);
    let c = 1.0 - (-2.0f64).exp();
    let modulus_defect = vals
        .iter()
        .zip(&mask)
        .zip(&interior)
        .filter(|(_, i)| **i)
        .map(|((v, inside), _)| (1.0 - v.norm_sqr() - if *inside { c } else { 0.0 }).abs())
        .fold(0.0, f64::max);

    let density: Vec<f64> = vals
        .iter()
        .zip(&mask)
        .map(|(v, inside)| {
            if *inside {
                (1.0 - v.norm_sqr()).max(0.0)
            } else {
                0.0
            }
        })
        .collect();
    let mu = BoundaryMeasure::zero().with_density(density.clone())?;
    let g = TaylorSeries::new(mu.fourier_coeffs(trunc))?;
    let inv_b = series_divide(
        &TaylorSeries::constant(C64::new(1.0, 0.0)),
        &b.truncate(trunc),
        trunc,
    )?;
    let f = toeplitz_conj_apply(&inv_b, &g);
    let back = toeplitz_conj_apply(&b.truncate(trunc), &f);
    let g_sup = g.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let toeplitz_residual = (0..=trunc)
        .map(|n| (back.coeff(n) - g.coeff(n)).norm())
        .fold(0.0, f64::max)
        / g_sup.max(f64::MIN_POSITIVE);

    let mass = mu.fourier_coeff(0);
    let stages = f_seq
        .iter()
        .enumerate()
        .map(|(i, fs)| {
            // quadrature against the grid density: (1/M)Σ conj(f(ζ_j))·u_j
            let fv = fs.eval_on_circle(1.0, grid_m);
            let pairing: C64 = fv
                .iter()
                .zip(&density)
                .map(|(v, u)| v.conj() * *u)
                .sum::<C64>()
                / grid_m as f64;
            Ok(DbrStage {
                n: i + 1,
                l1w_norm: l1w_norm(fs, &w.extended(fs.degree())?)?,
                pairing: pairing.norm(),
                deviation: (pairing - mass).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DbrReport {
        grid_m,
        b_degree,
        trunc,
        collar_cells: COLLAR_CELLS,
        modulus_defect,
        b0: b.coeff(0).norm(),
        b0_expected: (-k.measure_f64()).exp(),
        toeplitz_residual,
        g_norm: g.l2_norm(),
        mu_mass: mass.norm(),
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn blaschke_modulus_and_series() {
        let b = FiniteBlaschke::new(vec![c(0.0, 0.0), c(0.5, 0.0), c(-0.3, 0.6)]).unwrap();
        assert!(b.boundary_modulus_error(512) < 1e-12);
        let s = b.series(200);
        let z = c(0.3, -0.2);
        assert!((s.eval(z) - b.eval(z)).norm() < 1e-12);
        assert!(FiniteBlaschke::new(vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn trivial_bases() {
        let z = FiniteBlaschke::new(vec![c(0.0, 0.0)]).unwrap();
        let b = model_space_basis(&z, 8).unwrap();
        assert_eq!(b.basis.len(), 1);
        assert!(
            (b.basis[0].coeff(0) - 1.0).norm() < 1e-15
                && b.basis[0].coeffs()[1..].iter().all(|x| x.norm() < 1e-15)
        );
        let z2 = FiniteBlaschke::new(vec![c(0.0, 0.0); 2]).unwrap();
        let b = model_space_basis(&z2, 8).unwrap();
        assert!((b.basis[1].coeff(1).norm() - 1.0).abs() < 1e-15);
        assert!(
            model_space_basis(&FiniteBlaschke::new(vec![c(0.1, 0.0); 4]).unwrap(), 40).is_err()
        );
    }

    #[test]
    fn kernel_gram_matches_closed_form() {
        let zs = vec![c(0.0, 0.0), c(0.5, 0.0)];
        let theta = FiniteBlaschke::new(zs.clone()).unwrap();
        let k = reproducing_kernels(&theta, 80).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let g = inner(k[j].coeffs(), k[i].coeffs());
                assert!((g - 1.0 / (1.0 - zs[i].conj() * zs[j])).norm() < 1e-10);
            }
        }
        let b = model_space_basis(&theta, 80).unwrap();
        assert!(
            b.gram_residual < 1e-10 && b.orthogonality_residual < 1e-10,
            "{b:?}"
        );
    }

    #[test]
    fn confluent_basis_is_orthogonal_to_shifts() {
        let theta = FiniteBlaschke::new(vec![c(0.4, 0.1), c(0.4, 0.1), c(-0.2, -0.5)]).unwrap();
        let b = model_space_basis(&theta, 120).unwrap();
        assert_eq!(b.basis.len(), 3);
        assert!(
            b.gram_residual < 1e-10 && b.orthogonality_residual < 1e-10,
            "{b:?}"
        );
    }

    #[test]
    fn dualcyc_monomial() {
        let z = FiniteBlaschke::new(vec![c(0.0, 0.0)]).unwrap();
        let r = dualcyc_gap(&z, &YoungFunction::power(3.0).unwrap(), 8).unwrap();
        assert!(
            (r.dist - 1.0).abs() < 1e-9 && (r.min_norm - 1.0).abs() < 1e-9,
            "{r:?}"
        );
    }

    #[test]
    fn dualcyc_hilbert_case() {
        let phi = YoungFunction::power(2.0).unwrap();
        let r = dualcyc_gap(
            &FiniteBlaschke::new(vec![c(0.0, 0.0), c(0.5, 0.0)]).unwrap(),
            &phi,
            48,
        )
        .unwrap();
        assert!((r.dist - 1.0).abs() < 1e-6, "{r:?}");
        let r = dualcyc_gap(&FiniteBlaschke::new(vec![c(0.5, 0.0)]).unwrap(), &phi, 48).unwrap();
        assert!((r.dist * r.dist - 0.75).abs() < 1e-6, "{r:?}");
        assert!((r.product - 1.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn dbr_full_circle() {
        let w = WeightSequence::geometric(0.5, 100).unwrap();
        let one = TaylorSeries::constant(C64::new(1.0, 0.0));
        let r = dbr_pairing_demo(&ArcSet::full(), &[one], &w, 1024, 64).unwrap();
        assert!((r.b0 - (-1.0f64).exp()).abs() < 1e-12, "{r:?}");
        assert!(r.modulus_defect < 1e-12);
    }
}
