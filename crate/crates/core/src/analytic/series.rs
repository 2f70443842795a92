use serde::{Deserialize, Serialize};

use super::fft;
use crate::orlicz::CoefficientSequence;
use crate::{Error, Result, C64};

/// Truncated power series `Σ_{n≤degree} f̂(n) zⁿ`. Never empty: the zero
/// series has the single coefficient 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct TaylorSeries {
    coeffs: CoefficientSequence,
}

impl TryFrom<Vec<C64>> for TaylorSeries {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<TaylorSeries> for Vec<C64> {
    fn from(s: TaylorSeries) -> Self {
        s.coeffs.into_vec()
    }
}

impl TaylorSeries {
    pub fn new(mut coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        Ok(Self {
            coeffs: CoefficientSequence::new(coeffs)?,
        })
    }

    /// Caller guarantees finite entries.
    pub(crate) fn from_vec(mut coeffs: Vec<C64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        debug_assert!(coeffs.iter().all(|c| c.is_finite()));
        Self {
            coeffs: CoefficientSequence::new(coeffs).expect("finite coefficients"),
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::from_vec(Vec::new())
    }

    pub fn constant(c: C64) -> Self {
        Self::from_vec(vec![c])
    }

    pub fn monomial(n: usize, c: C64) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); n + 1];
        v[n] = c;
        Self::from_vec(v)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> C64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs.into_vec()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &c)| c * n as f64)
            .collect();
        Self::from_vec(v)
    }

    /// `f(rz)`.
    pub fn dilate(&self, r: f64) -> Self {
        let mut p = 1.0;
        let v = self
            .coeffs
            .iter()
            .map(|&c| {
                let out = c * p;
                p *= r;
                out
            })
            .collect();
        Self::from_vec(v)
    }

    /// Values `f(r·e^{2πij/m})`, `j < m`: coefficients folded modulo `m`,
    /// then one inverse transform.
    pub fn eval_on_circle(&self, r: f64, m: usize) -> Vec<C64> {
        assert!(m > 0, "need at least one sample");
        let mut buf = vec![C64::new(0.0, 0.0); m];
        let mut p = 1.0;
        for (n, &c) in self.coeffs.iter().enumerate() {
            buf[n % m] += c * p;
            p *= r;
        }
        fft::inverse(&mut buf);
        buf
    }

    pub fn truncate(&self, degree: usize) -> Self {
        Self::from_vec(self.coeffs[..self.coeffs.len().min(degree + 1)].to_vec())
    }

    /// Drops trailing coefficients of modulus `≤ tol`.
    pub fn trim(&self, tol: f64) -> Self {
        let keep = self
            .coeffs
            .iter()
            .rposition(|c| c.norm() > tol)
            .map_or(1, |i| i + 1);
        self.truncate(keep - 1)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_vec(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_vec((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_vec((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    /// Product truncated at `max_degree`.
    pub fn mul(&self, other: &Self, max_degree: usize) -> Self {
        let (a, b) = (self.coeffs(), other.coeffs());
        let full = a.len() + b.len() - 1;
        let out_len = full.min(max_degree + 1);
        if a.len().min(b.len()) <= 32 {
            let mut out = vec![C64::new(0.0, 0.0); out_len];
            for (i, &x) in a.iter().enumerate().take(out_len) {
                for (j, &y) in b.iter().enumerate().take(out_len - i) {
                    out[i + j] += x * y;
                }
            }
            return Self::from_vec(out);
        }
        let size = full.next_power_of_two();
        let mut fa = vec![C64::new(0.0, 0.0); size];
        let mut fb = fa.clone();
        fa[..a.len()].copy_from_slice(a);
        fb[..b.len()].copy_from_slice(b);
        fft::forward(&mut fa);
        fft::forward(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x *= *y;
        }
        fft::inverse(&mut fa);
        let inv = 1.0 / size as f64;
        Self::from_vec(fa[..out_len].iter().map(|&c| c * inv).collect())
    }

    /// `zᵏ·f`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); k];
        v.extend_from_slice(self.coeffs());
        Self::from_vec(v)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

/// `f/g` up to `degree` by forward substitution.
pub fn series_divide(f: &TaylorSeries, g: &TaylorSeries, degree: usize) -> Result<TaylorSeries> {
    let g0 = g.coeff(0);
    if g0.norm() <= 1e-14 {
        return Err(Error::Division(format!("|g(0)| = {:e}", g0.norm())));
    }
    let gc = g.coeffs();
    let mut h = Vec::with_capacity(degree + 1);
    for n in 0..=degree {
        let mut acc = f.coeff(n);
        for k in n.saturating_sub(gc.len() - 1)..n {
            acc -= h[k] * gc[n - k];
        }
        h.push(acc / g0);
    }
    TaylorSeries::new(h)
}

/// `ĥ(n) = Σ_k conj(b̂(k))·f̂(n+k)` for `n ≤ deg f`.
pub fn toeplitz_conj_apply(b: &TaylorSeries, f: &TaylorSeries) -> TaylorSeries {
    let fc = f.coeffs();
    let bc = b.coeffs();
    let v = (0..fc.len())
        .map(|n| bc.iter().zip(&fc[n..]).map(|(bk, fk)| bk.conj() * fk).sum())
        .collect();
    TaylorSeries::from_vec(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn eval_and_derivative() {
        let f = TaylorSeries::monomial(2, c(1.0));
        assert!((f.eval(C64::i()) - c(-1.0)).norm() < 1e-15);
        assert_eq!(f.derivative().coeffs(), &[c(0.0), c(2.0)]);
        let mut fact = 1.0;
        let exp: Vec<f64> = (0..=8)
            .map(|n| {
                if n > 0 {
                    fact *= n as f64;
                }
                1.0 / fact
            })
            .collect();
        let e = TaylorSeries::from_real(&exp).unwrap().eval(c(1.0));
        assert!((e.re - std::f64::consts::E).abs() < 1e-4);
    }

    #[test]
    fn dilation() {
        let z = TaylorSeries::monomial(1, c(1.0));
        assert_eq!(z.dilate(0.5).coeffs(), &[c(0.0), c(0.5)]);
        let f = TaylorSeries::from_real(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(f.dilate(1.0), f);
        assert!((f.dilate(0.1).eval(c(1.0)).re - 1.11).abs() < 1e-15);
    }

    #[test]
    fn circle_values_match_horner() {
        let f = TaylorSeries::new(
            (0..40)
                .map(|n| C64::new(n as f64, 1.0 / (n + 1) as f64))
                .collect(),
        )
        .unwrap();
        let vals = f.eval_on_circle(0.9, 16);
        for (j, v) in vals.iter().enumerate() {
            let z = fft::root_of_unity(j as i64, 16) * 0.9;
            assert!((f.eval(z) - v).norm() < 1e-11);
        }
    }

    #[test]
    fn division_examples() {
        let one = TaylorSeries::constant(c(1.0));
        let g = TaylorSeries::from_real(&[1.0, -1.0]).unwrap();
        assert_eq!(series_divide(&one, &g, 5).unwrap().coeffs(), &[c(1.0); 6]);
        let f = TaylorSeries::from_real(&[1.0, 0.0, -1.0]).unwrap();
        assert_eq!(
            series_divide(&f, &g, 3).unwrap().coeffs(),
            &[c(1.0), c(1.0), c(0.0), c(0.0)]
        );
        let h = series_divide(&f, &f, 4).unwrap();
        assert_eq!(h.coeffs()[0], c(1.0));
        assert!(h.coeffs()[1..].iter().all(|x| x.norm() < 1e-15));
        let z = TaylorSeries::monomial(1, c(1.0));
        assert!(matches!(
            series_divide(&one, &z, 3),
            Err(Error::Division(_))
        ));
    }

    #[test]
    fn toeplitz_examples() {
        let f = TaylorSeries::from_real(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(toeplitz_conj_apply(&TaylorSeries::constant(c(1.0)), &f), f);
        let z = TaylorSeries::monomial(1, c(1.0));
        let z2 = TaylorSeries::monomial(2, c(1.0));
        assert_eq!(
            toeplitz_conj_apply(&z, &z2).coeffs(),
            &[c(0.0), c(1.0), c(0.0)]
        );
        let b = TaylorSeries::from_real(&[1.0, 1.0]).unwrap();
        assert_eq!(
            toeplitz_conj_apply(&b, &f).coeffs(),
            &[c(2.0), c(2.0), c(1.0)]
        );
    }

    #[test]
    fn fft_product_matches_direct() {
        let a =
            TaylorSeries::new((0..100).map(|n| C64::new((n as f64).sin(), 0.3)).collect()).unwrap();
        let b =
            TaylorSeries::new((0..70).map(|n| C64::new(1.0, (n as f64).cos())).collect()).unwrap();
        let fast = a.mul(&b, 150);
        let small = TaylorSeries::new(b.coeffs()[..20].to_vec()).unwrap();
        let direct = a.mul(&small, 150);
        assert_eq!(fast.degree(), 150);
        let x = C64::new(0.3, 0.4);
        let expect = a.eval(x) * b.eval(x);
        assert!((a.mul(&b, 1000).eval(x) - expect).norm() < 1e-10);
        assert!((a.mul(&small, 1000).eval(x) - a.eval(x) * small.eval(x)).norm() < 1e-10);
        assert_eq!(direct.degree(), 118);
    }
}
