//! Truncated Taylor series, boundary grids, discrete Fourier analysis and
//! transforms of boundary measures.

pub mod fft;
mod measure;
mod series;

use serde::{Deserialize, Serialize};

pub use measure::{Atom, BoundaryMeasure};
pub use series::{series_divide, toeplitz_conj_apply, TaylorSeries};

use crate::{Error, Result, C64};

/// Radius of the sampling circle for transcendental interior functions.
pub const INTERIOR_RADIUS: f64 = 1.0 - 1.0 / 4096.0;
/// Hard cap on degrees recovered from the interior circle; `ρ^{-2^14} ≈ e⁴`.
pub const MAX_INTERIOR_DEGREE: usize = 1 << 14;
/// Minimum number of interior samples.
pub const MIN_INTERIOR_SAMPLES: usize = 1 << 16;

/// Samples `g(e^{2πij/M})`, `M` a power of two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct BoundaryGrid {
    samples: Vec<C64>,
}

impl TryFrom<Vec<C64>> for BoundaryGrid {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BoundaryGrid> for Vec<C64> {
    fn from(g: BoundaryGrid) -> Self {
        g.samples
    }
}

impl BoundaryGrid {
    pub fn new(samples: Vec<C64>) -> Result<Self> {
        if samples.len() < 2 || !samples.len().is_power_of_two() {
            return Err(Error::Invalid(format!(
                "grid size {} is not a power of two ≥ 2",
                samples.len()
            )));
        }
        if samples.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("non-finite grid sample".into()));
        }
        Ok(Self { samples })
    }

    pub fn from_real(samples: Vec<f64>) -> Result<Self> {
        Self::new(samples.into_iter().map(|x| C64::new(x, 0.0)).collect())
    }

    /// `f` receives the angle `j/M` in turns.
    pub fn from_fn(m: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new((0..m).map(|j| f(j as f64 / m as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.re).collect()
    }

    pub fn mean(&self) -> C64 {
        self.samples.iter().sum::<C64>() / self.samples.len() as f64
    }

    /// Discrete spectrum `ĝ(n) = (1/M)Σ_j g_j e^{−2πijn/M}`, indices mod `M`.
    pub fn spectrum(&self) -> Vec<C64> {
        let mut buf = self.samples.clone();
        fft::forward(&mut buf);
        let inv = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|c| *c *= inv);
        buf
    }
}

/// First `degree + 1` discrete Fourier coefficients of `g`. Accuracy is the
/// caller's business (aliasing is bounded by the tail of the true series);
/// `4·degree ≤ M` is the intended regime and `degree < M` is enforced.
pub fn coeffs_from_boundary(g: &BoundaryGrid, degree: usize) -> Result<TaylorSeries> {
    if degree >= g.len() {
        return Err(Error::Precondition(format!(
            "degree {degree} needs more than {} samples",
            g.len()
        )));
    }
    let mut spec = g.spectrum();
    spec.truncate(degree + 1);
    TaylorSeries::new(spec)
}

/// Boundary harmonic conjugate via the multiplier `−i·sgn(n)`; mean and
/// Nyquist bins are sent to zero. Imaginary parts of the input are ignored.
pub fn conjugate_function(g: &BoundaryGrid) -> BoundaryGrid {
    let m = g.len();
    let mut buf: Vec<C64> = g.samples.iter().map(|c| C64::new(c.re, 0.0)).collect();
    fft::forward(&mut buf);
    buf[0] = C64::new(0.0, 0.0);
    buf[m / 2] = C64::new(0.0, 0.0);
    let minus_i = C64::new(0.0, -1.0);
    for (n, c) in buf.iter_mut().enumerate() {
        if n > 0 && n < m / 2 {
            *c *= minus_i;
        } else if n > m / 2 {
            *c *= -minus_i;
        }
    }
    fft::inverse(&mut buf);
    let inv = 1.0 / m as f64;
    BoundaryGrid {
        samples: buf.iter().map(|c| C64::new(c.re * inv, 0.0)).collect(),
    }
}

/// Coefficients from samples on the circle of radius `rho`:
/// `f̂(n) = ρ^{-n}·(1/L)Σ_j f(ρe^{2πij/L}) e^{−2πijn/L}`.
pub fn coeffs_from_interior(
    mut samples: Vec<C64>,
    rho: f64,
    degree: usize,
) -> Result<TaylorSeries> {
    let l = samples.len();
    if degree >= l {
        return Err(Error::Precondition(format!(
            "degree {degree} needs more than {l} samples"
        )));
    }
    fft::forward(&mut samples);
    let inv = 1.0 / l as f64;
    let mut scale = inv;
    let coeffs = samples[..=degree]
        .iter()
        .map(|&c| {
            let out = c * scale;
            scale /= rho;
            out
        })
        .collect();
    TaylorSeries::new(coeffs)
}

/// Sample count for interior synthesis of a degree-`degree` series.
pub fn interior_samples(degree: usize, extra: usize) -> usize {
    MIN_INTERIOR_SAMPLES
        .max((4 * degree).next_power_of_two())
        .max(extra.next_power_of_two())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_coefficients() {
        let g = BoundaryGrid::from_fn(8, fft::turn).unwrap();
        let f = coeffs_from_boundary(&g, 2).unwrap();
        assert!((f.coeff(1) - 1.0).norm() < 1e-15 && f.coeff(0).norm() < 1e-15);
        let three = BoundaryGrid::from_fn(8, |_| C64::new(3.0, 0.0)).unwrap();
        assert!((coeffs_from_boundary(&three, 2).unwrap().coeff(0) - 3.0).norm() < 1e-15);
        let geo = BoundaryGrid::from_fn(1024, |t| 1.0 / (1.0 - 0.5 * fft::turn(t))).unwrap();
        let f = coeffs_from_boundary(&geo, 64).unwrap();
        for n in 0..=64 {
            assert!((f.coeff(n) - 0.5f64.powi(n as i32)).norm() < 1e-12);
        }
        assert!(coeffs_from_boundary(&three, 8).is_err());
    }

    #[test]
    fn conjugate_examples() {
        use std::f64::consts::TAU;
        let m = 256;
        for k in [1.0, 3.0] {
            let g = BoundaryGrid::from_fn(m, |t| C64::new((k * TAU * t).cos(), 0.0)).unwrap();
            let h = conjugate_function(&g);
            for (j, v) in h.samples().iter().enumerate() {
                let t = j as f64 / m as f64;
                assert!((v.re - (k * TAU * t).sin()).abs() < 1e-12);
            }
        }
        let c = BoundaryGrid::from_real(vec![2.5; 16]).unwrap();
        assert!(conjugate_function(&c)
            .samples()
            .iter()
            .all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn interior_recovery() {
        let rho = INTERIOR_RADIUS;
        let l = 4096;
        let samples = (0..l)
            .map(|j| {
                let z = fft::root_of_unity(j as i64, l) * rho;
                (z * 0.9).exp()
            })
            .collect();
        let f = coeffs_from_interior(samples, rho, 30).unwrap();
        let mut expect = 1.0;
        for n in 0..=30 {
            assert!((f.coeff(n) - expect).norm() < 1e-12, "n = {n}");
            expect *= 0.9 / (n + 1) as f64;
        }
    }
}
