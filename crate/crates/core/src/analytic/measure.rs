use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fft::{self, root_of_unity, turn};
use super::series::TaylorSeries;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    /// Angle in turns, `[0, 1)`.
    pub theta: f64,
    pub weight: C64,
}

impl Atom {
    pub fn new(theta: f64, mass: f64) -> Self {
        Atom {
            theta,
            weight: C64::new(mass, 0.0),
        }
    }

    pub fn point(&self) -> C64 {
        turn(self.theta)
    }
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct MeasureRepr {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density: Option<Vec<f64>>,
}

/// Atoms plus an optional nonnegative density sampled at `θ_j = j/M`.
/// The density contributes `(1/M)Σ_j d_j δ_{ζ_j}`; every transform below
/// treats it as that discrete measure, so the formulas are exact for it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct BoundaryMeasure {
    atoms: Vec<Atom>,
    density: Option<Vec<f64>>,
}

impl TryFrom<MeasureRepr> for BoundaryMeasure {
    type Error = Error;
    fn try_from(r: MeasureRepr) -> Result<Self> {
        let mu = BoundaryMeasure::from_atoms(r.atoms)?;
        match r.density {
            Some(d) => mu.with_density(d),
            None => Ok(mu),
        }
    }
}

impl From<BoundaryMeasure> for MeasureRepr {
    fn from(m: BoundaryMeasure) -> Self {
        MeasureRepr {
            atoms: m.atoms,
            density: m.density,
        }
    }
}

/// Fractional part of `n·θ` without losing the low bits of the product.
fn frac_product(n: u64, theta: f64) -> f64 {
    let nf = n as f64;
    let p = nf * theta;
    let err = nf.mul_add(theta, -p);
    (p - p.floor()) + err
}

impl BoundaryMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if !(0.0..1.0).contains(&a.theta) || !a.weight.is_finite() {
                return Err(Error::Invalid(format!(
                    "atom at θ = {} with weight {}",
                    a.theta, a.weight
                )));
            }
        }
        Ok(Self {
            atoms,
            density: None,
        })
    }

    pub fn atom(theta: f64, mass: f64) -> Result<Self> {
        Self::from_atoms(vec![Atom::new(theta, mass)])
    }

    pub fn with_density(mut self, density: Vec<f64>) -> Result<Self> {
        if !density.len().is_power_of_two() {
            return Err(Error::Invalid(format!(
                "density grid size {} is not a power of two",
                density.len()
            )));
        }
        if density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::Invalid(
                "density must be finite and nonnegative".into(),
            ));
        }
        self.density = Some(density);
        Ok(self)
    }

    /// Normalised Lebesgue measure on an `m`-point grid.
    pub fn uniform(m: usize) -> Result<Self> {
        Self::zero().with_density(vec![1.0; m])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&[f64]> {
        self.density.as_deref()
    }

    pub fn grid_size(&self) -> Option<usize> {
        self.density.as_ref().map(Vec::len)
    }

    pub fn is_positive(&self) -> bool {
        self.atoms
            .iter()
            .all(|a| a.weight.im == 0.0 && a.weight.re >= 0.0)
    }

    pub fn total_mass(&self) -> C64 {
        let atoms: C64 = self.atoms.iter().map(|a| a.weight).sum();
        let dens = self
            .density
            .as_ref()
            .map_or(0.0, |d| d.iter().sum::<f64>() / d.len() as f64);
        atoms + dens
    }

    /// Point masses of the discretised measure: atoms, then density cells
    /// with nonzero weight.
    pub fn point_masses(&self) -> Vec<(f64, C64)> {
        let mut out: Vec<(f64, C64)> = self.atoms.iter().map(|a| (a.theta, a.weight)).collect();
        if let Some(d) = &self.density {
            let m = d.len() as f64;
            out.extend(
                d.iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0.0)
                    .map(|(j, &x)| (j as f64 / m, C64::new(x / m, 0.0))),
            );
        }
        out
    }

    fn check_interior(z: C64) -> Result<()> {
        if z.norm() >= 1.0 || !z.is_finite() {
            return Err(Error::Domain(format!("|z| = {} is not < 1", z.norm())));
        }
        Ok(())
    }

    /// `∫ dμ(ζ)/(1 − ζ̄z)`.
    pub fn cauchy_transform(&self, z: C64) -> Result<C64> {
        self.cauchy_transform_weighted(z, |_| C64::new(1.0, 0.0))
    }

    /// `∫ κ(ζ) dμ(ζ)/(1 − ζ̄z)`.
    pub fn cauchy_transform_weighted(&self, z: C64, kappa: impl Fn(C64) -> C64) -> Result<C64> {
        Self::check_interior(z)?;
        let mut acc: C64 = self
            .atoms
            .iter()
            .map(|a| {
                let zeta = a.point();
                a.weight * kappa(zeta) / (1.0 - zeta.conj() * z)
            })
            .sum();
        if let Some(d) = &self.density {
            let m = d.len();
            let s: C64 = d
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0.0)
                .map(|(j, &x)| {
                    let zeta = root_of_unity(j as i64, m);
                    x * kappa(zeta) / (1.0 - zeta.conj() * z)
                })
                .sum();
            acc += s / m as f64;
        }
        Ok(acc)
    }

    /// `μ̂(n) = ∫ ζ̄ⁿ dμ`.
    pub fn fourier_coeff(&self, n: u64) -> C64 {
        let mut acc: C64 = self
            .atoms
            .iter()
            .map(|a| a.weight * turn(-frac_product(n, a.theta)))
            .sum();
        if let Some(d) = &self.density {
            let m = d.len() as u64;
            let s: C64 = d
                .iter()
                .enumerate()
                .map(|(j, &x)| x * root_of_unity(-(((n % m) * j as u64 % m) as i64), m as usize))
                .sum();
            acc += s / m as f64;
        }
        acc
    }

    /// `μ̂(0..=n_max)`; the density part comes from one transform.
    pub fn fourier_coeffs(&self, n_max: usize) -> Vec<C64> {
        let mut out: Vec<C64> = (0..=n_max as u64)
            .into_par_iter()
            .map(|n| {
                self.atoms
                    .iter()
                    .map(|a| a.weight * turn(-frac_product(n, a.theta)))
                    .sum()
            })
            .collect();
        if let Some(d) = &self.density {
            let m = d.len();
            let mut buf: Vec<C64> = d.iter().map(|&x| C64::new(x, 0.0)).collect();
            fft::forward(&mut buf);
            for (n, o) in out.iter_mut().enumerate() {
                *o += buf[n % m] / m as f64;
            }
        }
        out
    }

    /// `∫ (ζ+z)/(ζ−z) dμ(ζ)`.
    pub fn herglotz(&self, z: C64) -> Result<C64> {
        Self::check_interior(z)?;
        let mut acc = C64::new(0.0, 0.0);
        for a in &self.atoms {
            let zeta = a.point();
            if zeta == z {
                return Err(Error::Singularity(format!(
                    "z coincides with the atom at θ = {}",
                    a.theta
                )));
            }
            acc += a.weight * (zeta + z) / (zeta - z);
        }
        if let Some(d) = &self.density {
            let m = d.len();
            let s: C64 = d
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0.0)
                .map(|(j, &x)| {
                    let zeta = root_of_unity(j as i64, m);
                    x * (zeta + z) / (zeta - z)
                })
                .sum();
            acc += s / m as f64;
        }
        Ok(acc)
    }

    /// Herglotz transform at `ρ·e^{2πij/l}`, `j < l`. Atoms are summed
    /// directly; the density part uses `K(z) = P(z)/(1 − z^M)` with `P` the
    /// first `M` coefficients, which is exact for the grid measure.
    pub fn herglotz_on_circle(&self, rho: f64, l: usize) -> Vec<C64> {
        assert!(rho < 1.0 && l > 0);
        let mut out: Vec<C64> = (0..l)
            .into_par_iter()
            .map(|j| {
                let z = root_of_unity(j as i64, l) * rho;
                self.atoms
                    .iter()
                    .map(|a| {
                        let zeta = a.point();
                        a.weight * (zeta + z) / (zeta - z)
                    })
                    .sum()
            })
            .collect();
        if let Some(d) = &self.density {
            let m = d.len();
            let mut spec: Vec<C64> = d.iter().map(|&x| C64::new(x, 0.0)).collect();
            fft::forward(&mut spec);
            let inv = 1.0 / m as f64;
            let mass = spec[0].re * inv;
            let p = TaylorSeries::from_vec(spec.iter().map(|&c| c * inv).collect());
            let pv = p.eval_on_circle(rho, l);
            let rho_m = rho.powi(m as i32);
            for (j, (o, v)) in out.iter_mut().zip(pv).enumerate() {
                let zm = root_of_unity((j as i64) * (m as i64 % l as i64), l) * rho_m;
                *o += 2.0 * v / (1.0 - zm) - mass;
            }
        }
        out
    }

    /// `H′(z) = ∫ 2ζ/(ζ−z)² dμ(ζ)` at `ρ·e^{2πij/l}`, same scheme as
    /// [`Self::herglotz_on_circle`].
    pub fn herglotz_derivative_on_circle(&self, rho: f64, l: usize) -> Vec<C64> {
        assert!(rho < 1.0 && l > 0);
        let mut out: Vec<C64> = (0..l)
            .into_par_iter()
            .map(|j| {
                let z = root_of_unity(j as i64, l) * rho;
                self.atoms
                    .iter()
                    .map(|a| {
                        let zeta = a.point();
                        2.0 * a.weight * zeta / ((zeta - z) * (zeta - z))
                    })
                    .sum()
            })
            .collect();
        if let Some(d) = &self.density {
            let m = d.len();
            let mut spec: Vec<C64> = d.iter().map(|&x| C64::new(x, 0.0)).collect();
            fft::forward(&mut spec);
            let inv = 1.0 / m as f64;
            let p = TaylorSeries::from_vec(spec.iter().map(|&c| c * inv).collect());
            let pv = p.eval_on_circle(rho, l);
            let dpv = p.derivative().eval_on_circle(rho, l);
            let rho_m = rho.powi(m as i32);
            for (j, o) in out.iter_mut().enumerate() {
                let z = root_of_unity(j as i64, l) * rho;
                let zm = root_of_unity((j as i64) * (m as i64 % l as i64), l) * rho_m;
                let q = 1.0 - zm;
                // K = P/(1 − z^M), K′ = P′/q + P·M z^{M−1}/q²
                let dk = dpv[j] / q + pv[j] * (m as f64) * zm / (z * q * q);
                *o += 2.0 * dk;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_examples() {
        let a = BoundaryMeasure::atom(0.0, 1.0).unwrap();
        assert_eq!(
            a.cauchy_transform(C64::new(0.0, 0.0)).unwrap(),
            C64::new(1.0, 0.0)
        );
        assert!((a.cauchy_transform(C64::new(0.5, 0.0)).unwrap() - 2.0).norm() < 1e-15);
        let u = BoundaryMeasure::uniform(64).unwrap();
        assert!((u.cauchy_transform(C64::new(0.3, 0.2)).unwrap() - 1.0).norm() < 1e-12);
        assert!(matches!(
            u.cauchy_transform(C64::new(1.0, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn fourier_examples() {
        let a = BoundaryMeasure::atom(0.0, 1.0).unwrap();
        assert!((a.fourier_coeff(5) - 1.0).norm() < 1e-15);
        let q = BoundaryMeasure::atom(0.25, 1.0).unwrap();
        assert!((q.fourier_coeff(1) - C64::new(0.0, -1.0)).norm() < 1e-15);
        let u = BoundaryMeasure::uniform(64).unwrap();
        assert!(u.fourier_coeff(3).norm() < 1e-15);
        assert!((u.fourier_coeff(64) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn batch_coeffs_match_single() {
        let mu = BoundaryMeasure::from_atoms(vec![Atom::new(0.1, 0.5), Atom::new(0.73, 1.5)])
            .unwrap()
            .with_density((0..32).map(|j| 1.0 + (j as f64).sin().abs()).collect())
            .unwrap();
        let batch = mu.fourier_coeffs(100);
        for n in [0usize, 1, 31, 32, 33, 99] {
            assert!((batch[n] - mu.fourier_coeff(n as u64)).norm() < 1e-12);
        }
    }

    #[test]
    fn herglotz_examples() {
        let a = BoundaryMeasure::atom(0.0, 1.0).unwrap();
        assert!((a.herglotz(C64::new(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!((a.herglotz(C64::new(-0.5, 0.0)).unwrap() - 1.0 / 3.0).norm() < 1e-15);
        let u = BoundaryMeasure::uniform(128).unwrap();
        assert!((u.herglotz(C64::new(0.5, 0.0)).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn circle_herglotz_matches_pointwise() {
        let mu = BoundaryMeasure::from_atoms(vec![Atom::new(0.2, 0.3)])
            .unwrap()
            .with_density(
                (0..64)
                    .map(|j| 1.0 + 0.5 * (0.3 * j as f64).cos())
                    .collect(),
            )
            .unwrap();
        for l in [16usize, 64, 256] {
            let v = mu.herglotz_on_circle(0.97, l);
            for j in (0..l).step_by(l / 8) {
                let z = root_of_unity(j as i64, l) * 0.97;
                assert!(
                    (v[j] - mu.herglotz(z).unwrap()).norm() < 1e-9,
                    "l = {l}, j = {j}"
                );
            }
            let dv = mu.herglotz_derivative_on_circle(0.97, l);
            let h = 1e-6;
            for j in (0..l).step_by(l / 8) {
                let z = root_of_unity(j as i64, l) * 0.97;
                let fd = (mu.herglotz(z + h).unwrap() - mu.herglotz(z - h).unwrap()) / (2.0 * h);
                assert!(
                    (dv[j] - fd).norm() < 1e-4 * (1.0 + fd.norm()),
                    "l = {l}, j = {j}"
                );
            }
        }
    }

    #[test]
    fn serde_shape() {
        let mu = BoundaryMeasure::atom(0.25, 2.0).unwrap();
        let s = serde_json::to_string(&mu).unwrap();
        assert_eq!(s, r#"{"atoms":[{"theta":0.25,"weight":[2.0,0.0]}]}"#);
        let bad: std::result::Result<BoundaryMeasure, _> =
            serde_json::from_str(r#"{"density":[1.0,1.0,1.0]}"#);
        assert!(bad.is_err());
    }
}
