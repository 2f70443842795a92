//! Weighted Bloch norms `‖f‖_w = |f(0)| + sup (1−|z|)/w(1−|z|)·|f′(z)|` on a
//! polar grid, coefficient bounds, the Orlicz embedding check and the
//! dilation-quotient cyclicity diagnostic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{series_divide, TaylorSeries};
use crate::majorants::Majorant;
use crate::orlicz::{orlicz_norm, YoungFunction};
use crate::{Error, Result, C64};

/// Largest `N`-ratio allowed by the coefficient estimate:
/// `sup_{N≥2} (1 − 1/N)^{−2N} = 16`.
pub const FOURIER_BOUND: f64 = 16.0;

/// Tensor grid of radii × equispaced angles; the disk sup is taken over it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    radii: Vec<f64>,
    n_angles: usize,
}

impl Default for DiskGrid {
    /// Radii `1 − 2^{-j}`, `j = 0..=12`, and 256 angles.
    fn default() -> Self {
        Self::dyadic(12, 256)
    }
}

impl DiskGrid {
    pub fn new(radii: Vec<f64>, n_angles: usize) -> Result<Self> {
        if radii.is_empty() || n_angles == 0 {
            return Err(Error::Invalid("disk grid needs radii and angles".into()));
        }
        if radii.iter().any(|r| !(0.0..1.0).contains(r)) {
            return Err(Error::Invalid("grid radii must lie in [0, 1)".into()));
        }
        Ok(Self { radii, n_angles })
    }

    pub fn dyadic(j_max: u32, n_angles: usize) -> Self {
        Self {
            radii: (0..=j_max).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect(),
            n_angles,
        }
    }

    /// Radii `1 − 2^{-j/s}` for `j = 0..=s·j_max` and `n_angles` angles.
    pub fn refined(j_max: u32, per_octave: u32, n_angles: usize) -> Self {
        let radii = (0..=j_max * per_octave)
            .map(|j| 1.0 - 2f64.powf(-(j as f64) / per_octave as f64))
            .collect();
        Self { radii, n_angles }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn n_angles(&self) -> usize {
        self.n_angles
    }

    pub fn point(&self, radius_index: usize, angle_index: usize) -> C64 {
        crate::analytic::fft::root_of_unity(angle_index as i64, self.n_angles)
            * self.radii[radius_index]
    }

    /// Row-major arg-max; the first maximiser wins.
    fn arg_max(&self, rows: &[Vec<f64>]) -> (f64, usize, usize) {
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > best.0 {
                    best = (v, i, j);
                }
            }
        }
        best
    }

    fn arg_min(&self, rows: &[Vec<f64>]) -> (f64, usize, usize) {
        let neg: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| -v).collect())
            .collect();
        let (v, i, j) = self.arg_max(&neg);
        (-v, i, j)
    }
}

/// Values of `f` on every grid circle, row-major.
fn circle_rows(f: &TaylorSeries, grid: &DiskGrid) -> Vec<Vec<C64>> {
    grid.radii
        .par_iter()
        .map(|&r| f.eval_on_circle(r, grid.n_angles))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlochNorm {
    pub value: f64,
    /// `sup (1−|z|)/w(1−|z|)·|f′(z)|` over the grid.
    pub seminorm: f64,
    pub max_point: C64,
}

pub fn bloch_norm(f: &TaylorSeries, w: &Majorant, grid: &DiskGrid) -> BlochNorm {
    let df = f.derivative();
    let rows: Vec<Vec<f64>> = circle_rows(&df, grid)
        .into_iter()
        .zip(&grid.radii)
        .map(|(vals, &r)| {
            let s = (1.0 - r) / w.eval(1.0 - r);
            vals.iter().map(|v| s * v.norm()).collect()
        })
        .collect();
    let (seminorm, i, j) = grid.arg_max(&rows);
    BlochNorm {
        value: f.coeff(0).norm() + seminorm,
        seminorm,
        max_point: grid.point(i, j),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierBoundReport {
    pub norm: f64,
    /// `(N, Σ_{n≤N} n²|f̂(n)|² / (N² w(1/N)² ‖f‖²_w))`.
    pub ratios: Vec<(usize, f64)>,
    /// `(n, |f̂(n)| / (w(1/n) ‖f‖_w))`.
    pub coeff_ratios: Vec<(usize, f64)>,
    pub max_ratio: f64,
    pub max_coeff_ratio: f64,
    /// Constant `f`: nothing to bound.
    pub trivial: bool,
    pub holds: bool,
}

pub fn fourier_bound_report(f: &TaylorSeries, w: &Majorant, grid: &DiskGrid) -> FourierBoundReport {
    let norm = bloch_norm(f, w, grid).value;
    let nonconstant = f.coeffs().iter().skip(1).any(|c| c.norm() > 0.0);
    if !nonconstant || norm == 0.0 {
        return FourierBoundReport {
            norm,
            ratios: Vec::new(),
            coeff_ratios: Vec::new(),
            max_ratio: 0.0,
            max_coeff_ratio: 0.0,
            trivial: true,
            holds: true,
        };
    }
    let mut acc = 0.0;
    let mut ratios = Vec::with_capacity(f.degree());
    let mut coeff_ratios = Vec::with_capacity(f.degree());
    for n in 1..=f.degree() {
        let nf = n as f64;
        let c = f.coeff(n).norm();
        let wn = w.eval(1.0 / nf);
        acc += nf * nf * c * c;
        ratios.push((n, acc / (nf * nf * wn * wn * norm * norm)));
        coeff_ratios.push((n, c / (wn * norm)));
    }
    let max_ratio = ratios.iter().skip(1).map(|r| r.1).fold(0.0, f64::max);
    let max_coeff_ratio = coeff_ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let holds = max_ratio <= FOURIER_BOUND
        && max_coeff_ratio <= FOURIER_BOUND
        && ratios[0].1 <= 1.0 + 1e-12;
    FourierBoundReport {
        norm,
        ratios,
        coeff_ratios,
        max_ratio,
        max_coeff_ratio,
        trivial: false,
        holds,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub orlicz_norm: f64,
    pub bloch_norm: f64,
    /// `None` when both norms vanish.
    pub ratio: Option<f64>,
    /// `(n, Σ_{2^{n−1} ≤ j < 2^n} Ψ(|f̂(j)|))`, block 0 being `j = 0`.
    pub blocks: Vec<(usize, f64)>,
}

pub fn embedding_report(
    f: &TaylorSeries,
    w: &Majorant,
    psi: &YoungFunction,
    grid: &DiskGrid,
) -> EmbeddingReport {
    let on = orlicz_norm(f.coeffs(), psi);
    let bn = bloch_norm(f, w, grid).value;
    let ratio = if bn == 0.0 { None } else { Some(on / bn) };
    let mut blocks = vec![(0, psi.value(f.coeff(0).norm()))];
    let mut n = 1;
    while (1usize << (n - 1)) <= f.degree() {
        let lo = 1usize << (n - 1);
        let hi = (1usize << n).min(f.degree() + 1);
        blocks.push((n, (lo..hi).map(|j| psi.value(f.coeff(j).norm())).sum()));
        n += 1;
    }
    EmbeddingReport {
        orlicz_norm: on,
        bloch_norm: bn,
        ratio,
        blocks,
    }
}

/// Nondecreasing function of `t` given by samples, linear in between and
/// constant beyond both ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct MonotoneTable {
    points: Vec<(f64, f64)>,
}

impl TryFrom<Vec<[f64; 2]>> for MonotoneTable {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(v.into_iter().map(|[t, y]| (t, y)).collect())
    }
}

impl From<MonotoneTable> for Vec<[f64; 2]> {
    fn from(m: MonotoneTable) -> Self {
        m.points.into_iter().map(|(t, y)| [t, y]).collect()
    }
}

impl MonotoneTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid("empty table".into()));
        }
        if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
            return Err(Error::Invalid("non-finite table entry".into()));
        }
        if points
            .windows(2)
            .any(|p| p[1].0 <= p[0].0 || p[1].1 < p[0].1)
        {
            return Err(Error::Invalid(
                "table must be strictly increasing in t and nondecreasing in value".into(),
            ));
        }
        Ok(Self { points })
    }

    /// Samples `f` at `2^{-k}`, `k = k_max..=0` (so `t` increases).
    pub fn dyadic(f: impl Fn(f64) -> f64, k_max: u32) -> Result<Self> {
        Self::new(
            (0..=k_max)
                .rev()
                .map(|k| {
                    let t = 0.5f64.powi(k as i32);
                    (t, f(t))
                })
                .collect(),
        )
    }

    pub fn eval(&self, t: f64) -> f64 {
        let p = &self.points;
        if t <= p[0].0 {
            return p[0].1;
        }
        if t >= p[p.len() - 1].0 {
            return p[p.len() - 1].1;
        }
        let i = p.partition_point(|q| q.0 < t);
        let (t0, y0) = p[i - 1];
        let (t1, y1) = p[i];
        y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CyclicityReport {
    /// `inf |f(z)|/u(1−|z|)`.
    pub c1: f64,
    /// `sup (1−|z|)|f′(z)|/v(1−|z|)`.
    pub c2: f64,
    /// `(t, v(t)/(u(t)w(t)))` at `t = 2^{-k}`.
    pub profile: Vec<(f64, f64)>,
    /// `(r, ‖f/f_r − 1‖_w)`.
    pub sweep: Vec<(f64, f64)>,
    pub quotient_degree: usize,
}

pub fn cyclicity_diagnostic(
    f: &TaylorSeries,
    u: &MonotoneTable,
    v: &MonotoneTable,
    w: &Majorant,
    r_list: &[f64],
    grid: &DiskGrid,
    quotient_degree: usize,
) -> Result<CyclicityReport> {
    if f.coeff(0).norm() <= 1e-14 {
        return Err(Error::Precondition(
            "f(0) = 0: the dilation quotient is undefined".into(),
        ));
    }
    let vals = circle_rows(f, grid);
    let dvals = circle_rows(&f.derivative(), grid);
    let lower: Vec<Vec<f64>> = vals
        .iter()
        .zip(&grid.radii)
        .map(|(row, &r)| row.iter().map(|x| x.norm() / u.eval(1.0 - r)).collect())
        .collect();
    let upper: Vec<Vec<f64>> = dvals
        .iter()
        .zip(&grid.radii)
        .map(|(row, &r)| {
            row.iter()
                .map(|x| (1.0 - r) * x.norm() / v.eval(1.0 - r))
                .collect()
        })
        .collect();
    let (c1, ..) = grid.arg_min(&lower);
    let (c2, ..) = grid.arg_max(&upper);
    let profile = (0..=12)
        .map(|k| {
            let t = 0.5f64.powi(k);
            (t, v.eval(t) / (u.eval(t) * w.eval(t)))
        })
        .collect();
    let one = TaylorSeries::constant(C64::new(1.0, 0.0));
    let sweep = r_list
        .iter()
        .map(|&r| {
            let q = series_divide(f, &f.dilate(r), quotient_degree)?.sub(&one);
            Ok((r, bloch_norm(&q, w, grid).value))
        })
        .collect::<Result<_>>()?;
    Ok(CyclicityReport {
        c1,
        c2,
        profile,
        sweep,
        quotient_degree,
    })
}
