//! Young functions, Legendre conjugates and Luxemburg norms on coefficient
//! sequences.

use std::ops::Deref;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

const DEFAULT_X_MAX: f64 = 16.0;
const CONVEXITY_GRID: usize = 64;
pub const TERNARY_TOL: f64 = 1e-10;
pub const NORM_REL_WIDTH: f64 = 1e-10;
/// The bracket for the conjugate's inner maximisation may grow to this
/// multiple of the function's own domain before we give up.
const Y_MAX_GROWTH_CAP: f64 = (1u64 << 40) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `c·t^p`, params `[p]` or `[p, c]`.
    Power,
    /// `t^p·ln(e + 1/t)^q`, params `[p]` or `[p, q]`.
    PowerLog,
    /// Piecewise linear through `samples`, last-chord extrapolation.
    Tabulated,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct YoungRepr {
    family: Family,
    #[serde(default)]
    params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_max: Option<f64>,
}

/// Convex gauge `Φ` on `[0, x_max]` with `Φ(0) = 0`.
///
/// Construction validates monotonicity and convexity and records the
/// empirical doubling constant near zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "YoungRepr", into = "YoungRepr")]
pub struct YoungFunction {
    family: Family,
    params: Vec<f64>,
    samples: Vec<(f64, f64)>,
    x_max: f64,
    c_dbl: f64,
}

impl TryFrom<YoungRepr> for YoungFunction {
    type Error = Error;

    fn try_from(r: YoungRepr) -> Result<Self> {
        let samples = r
            .samples
            .unwrap_or_default()
            .into_iter()
            .map(|[x, y]| (x, y))
            .collect();
        Self::build(r.family, r.params, samples, r.x_max)
    }
}

impl From<YoungFunction> for YoungRepr {
    fn from(f: YoungFunction) -> Self {
        let samples = (f.family == Family::Tabulated)
            .then(|| f.samples.iter().map(|&(x, y)| [x, y]).collect());
        YoungRepr {
            family: f.family,
            params: f.params,
            samples,
            x_max: Some(f.x_max),
        }
    }
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        Self::build(Family::Power, vec![p], Vec::new(), None)
    }

    pub fn scaled_power(p: f64, c: f64) -> Result<Self> {
        Self::build(Family::Power, vec![p, c], Vec::new(), None)
    }

    pub fn power_log(p: f64, q: f64) -> Result<Self> {
        Self::build(Family::PowerLog, vec![p, q], Vec::new(), None)
    }

    /// `samples` must start at `(0, 0)`; it is prepended if missing.
    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        Self::build(Family::Tabulated, Vec::new(), samples, None)
    }

    pub fn with_x_max(self, x_max: f64) -> Result<Self> {
        if self.family == Family::Tabulated {
            return Err(Error::Invalid(
                "x_max of a table is its last abscissa".into(),
            ));
        }
        Self::build(self.family, self.params, Vec::new(), Some(x_max))
    }

    fn build(
        family: Family,
        params: Vec<f64>,
        mut samples: Vec<(f64, f64)>,
        x_max: Option<f64>,
    ) -> Result<Self> {
        match family {
            Family::Power => {
                let p = *params
                    .first()
                    .ok_or_else(|| Error::Invalid("power needs [p]".into()))?;
                let c = params.get(1).copied().unwrap_or(1.0);
                if !(p >= 1.0 && p.is_finite()) || !(c > 0.0 && c.is_finite()) || params.len() > 2 {
                    return Err(Error::Invalid(format!(
                        "power params {params:?}: need p >= 1, c > 0"
                    )));
                }
            }
            Family::PowerLog => {
                let p = *params
                    .first()
                    .ok_or_else(|| Error::Invalid("power-log needs [p]".into()))?;
                let q = params.get(1).copied().unwrap_or(1.0);
                if !(p >= 1.0 && p.is_finite()) || !(q >= 0.0 && q.is_finite()) || params.len() > 2
                {
                    return Err(Error::Invalid(format!(
                        "power-log params {params:?}: need p >= 1, q >= 0"
                    )));
                }
            }
            Family::Tabulated => {
                if !params.is_empty() {
                    return Err(Error::Invalid("tabulated family takes no params".into()));
                }
                if samples.first().map_or(true, |s| s.0 != 0.0) {
                    samples.insert(0, (0.0, 0.0));
                }
                if samples.len() < 2 {
                    return Err(Error::Invalid(
                        "table needs at least one positive abscissa".into(),
                    ));
                }
                if samples.iter().any(|s| !s.0.is_finite() || !s.1.is_finite()) {
                    return Err(Error::Invalid("non-finite table entry".into()));
                }
                if samples[0].1 != 0.0 {
                    return Err(Error::Precondition("Φ(0) must be 0".into()));
                }
                if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::Invalid(
                        "table abscissae must increase strictly".into(),
                    ));
                }
            }
        }
        let x_max = match family {
            Family::Tabulated => samples.last().unwrap().0,
            _ => x_max.unwrap_or(DEFAULT_X_MAX),
        };
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(Error::Invalid(format!("x_max = {x_max}")));
        }
        let mut phi = YoungFunction {
            family,
            params,
            samples,
            x_max,
            c_dbl: f64::NAN,
        };
        phi.check_shape()?;
        phi.c_dbl = phi.doubling_constant();
        Ok(phi)
    }

    fn check_shape(&self) -> Result<()> {
        if self.family == Family::Tabulated {
            let mut prev_slope = f64::NEG_INFINITY;
            for w in self.samples.windows(2) {
                let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                if slope < -1e-12 {
                    return Err(Error::Precondition(format!(
                        "table decreases near x = {}",
                        w[0].0
                    )));
                }
                if slope < prev_slope - 1e-9 * (1.0 + prev_slope.abs()) {
                    return Err(Error::Precondition(format!(
                        "table not convex near x = {}",
                        w[0].0
                    )));
                }
                prev_slope = slope;
            }
            return Ok(());
        }
        let h = self.x_max / CONVEXITY_GRID as f64;
        let v: Vec<f64> = (0..=CONVEXITY_GRID)
            .map(|k| self.value(k as f64 * h))
            .collect();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("Φ not finite on its domain".into()));
        }
        let scale = 1.0 + v[CONVEXITY_GRID] / (self.x_max * self.x_max);
        for k in 1..CONVEXITY_GRID {
            if v[k + 1] < v[k] {
                return Err(Error::Precondition(format!(
                    "Φ decreases near x = {}",
                    k as f64 * h
                )));
            }
            let dd = (v[k + 1] - 2.0 * v[k] + v[k - 1]) / (h * h);
            if dd < -1e-12 * scale {
                return Err(Error::Precondition(format!(
                    "Φ not convex near x = {}",
                    k as f64 * h
                )));
            }
        }
        Ok(())
    }

    fn doubling_constant(&self) -> f64 {
        let mut c: f64 = 1.0;
        for k in 2..=60 {
            let x = self.x_max * 0.5f64.powi(k);
            let (a, b) = (self.value(x), self.value(2.0 * x));
            if a > 0.0 {
                c = c.max(b / a);
            } else if b > 0.0 {
                return f64::INFINITY;
            }
        }
        c
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Empirical `sup Φ(2x)/Φ(x)` over `x = x_max·2^{-k}`, `k = 2..60`.
    pub fn c_dbl(&self) -> f64 {
        self.c_dbl
    }

    /// `Φ(x)` for `0 ≤ x ≤ x_max`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.x_max).contains(&x) {
            return Err(Error::Domain(format!(
                "x = {x} outside [0, {}]",
                self.x_max
            )));
        }
        Ok(self.value(x))
    }

    /// `Φ(x)` for any `x ≥ 0`: the formula for closed-form families, the last
    /// chord for tables. Norm and conjugate computations use this.
    pub fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Power => {
                let c = self.params.get(1).copied().unwrap_or(1.0);
                c * x.powf(self.params[0])
            }
            Family::PowerLog => {
                let q = self.params.get(1).copied().unwrap_or(1.0);
                x.powf(self.params[0]) * (std::f64::consts::E + 1.0 / x).ln().powf(q)
            }
            Family::Tabulated => {
                let s = &self.samples;
                let i = s.partition_point(|p| p.0 < x).clamp(1, s.len() - 1);
                let (x0, y0) = s[i - 1];
                let (x1, y1) = s[i];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }
}

/// Finite complex sequence `(â(n))_{n≥0}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct CoefficientSequence(Vec<C64>);

impl CoefficientSequence {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|c| !c.is_finite()) {
            return Err(Error::Invalid(format!("coefficient {i} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }
}

impl TryFrom<Vec<C64>> for CoefficientSequence {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CoefficientSequence> for Vec<C64> {
    fn from(s: CoefficientSequence) -> Self {
        s.0
    }
}

impl Deref for CoefficientSequence {
    type Target = [C64];
    fn deref(&self) -> &[C64] {
        &self.0
    }
}

/// Maximise `y ↦ xy − Φ(y)` over `y ≥ 0`.
pub fn conjugate_at(phi: &YoungFunction, x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("conjugate argument {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let g = |y: f64| x * y - phi.value(y);
    let mut y_max = phi.x_max();
    loop {
        let (mut lo, mut hi) = (0.0, y_max);
        for _ in 0..400 {
            if hi - lo <= TERNARY_TOL * hi.min(1.0) {
                break;
            }
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if g(m1) < g(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        let y = 0.5 * (lo + hi);
        // An argmax pinned to the right end means the bracket was too small.
        if y < y_max * (1.0 - 1e-6) || g(y_max) <= g(y_max * (1.0 - 1e-6)) {
            return Ok(g(y).max(g(lo)).max(g(hi)).max(0.0));
        }
        y_max *= 4.0;
        if y_max > phi.x_max() * Y_MAX_GROWTH_CAP {
            return Err(Error::Range(format!(
                "sup of xy − Φ(y) not attained for x = {x}"
            )));
        }
    }
}

/// Tabulated `Φ*` on `x_grid` with `Φ*(0) = 0` prepended.
pub fn legendre_conjugate(phi: &YoungFunction, x_grid: &[f64]) -> Result<YoungFunction> {
    if x_grid.is_empty() || x_grid[0] <= 0.0 || x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid(
            "conjugate grid must be positive and strictly increasing".into(),
        ));
    }
    let values: Vec<f64> = x_grid
        .par_iter()
        .map(|&x| conjugate_at(phi, x))
        .collect::<Result<_>>()?;
    let mut samples = Vec::with_capacity(x_grid.len() + 1);
    samples.push((0.0, 0.0));
    samples.extend(x_grid.iter().copied().zip(values));
    YoungFunction::tabulated(samples)
}

/// `Φ*` in the most accurate available form: closed form for `c·t^p`,
/// `p > 1`; otherwise a 2048-point table reaching past `Φ* = 4`.
pub fn conjugate_function(phi: &YoungFunction) -> Result<YoungFunction> {
    if phi.family() == Family::Power && phi.params()[0] > 1.0 {
        let p = phi.params()[0];
        let c = phi.params().get(1).copied().unwrap_or(1.0);
        let q = p / (p - 1.0);
        let c_star = (1.0 - 1.0 / p) * (c * p).powf(-1.0 / (p - 1.0));
        return YoungFunction::scaled_power(q, c_star);
    }
    let mut x_top = 1.0;
    while conjugate_at(phi, x_top)? < 4.0 {
        x_top *= 2.0;
        if x_top > 1e12 {
            return Err(Error::Range(
                "conjugate stays below 4 on a huge range".into(),
            ));
        }
    }
    let n = 2048;
    let grid: Vec<f64> = (1..=n).map(|k| x_top * k as f64 / n as f64).collect();
    legendre_conjugate(phi, &grid)
}

/// Luxemburg norm `inf{M > 0 : Σ Φ(|a_n|/M) ≤ 1}` by bisection.
pub fn orlicz_norm(a: &[C64], phi: &YoungFunction) -> f64 {
    let mags: Vec<f64> = a.iter().map(|c| c.norm()).filter(|&m| m > 0.0).collect();
    orlicz_norm_abs(&mags, phi)
}

/// Same as [`orlicz_norm`] on moduli.
pub fn orlicz_norm_abs(mags: &[f64], phi: &YoungFunction) -> f64 {
    let mags: Vec<f64> = mags.iter().copied().filter(|&m| m > 0.0).collect();
    if mags.is_empty() {
        return 0.0;
    }
    let modular = |m: f64| mags.iter().map(|&x| phi.value(x / m)).sum::<f64>();
    let mut hi: f64 = mags.iter().sum();
    let mut lo = mags.iter().copied().fold(0.0, f64::max);
    for _ in 0..2000 {
        if modular(hi) <= 1.0 {
            break;
        }
        hi *= 2.0;
    }
    lo = lo.min(hi);
    for _ in 0..2000 {
        if modular(lo) > 1.0 {
            break;
        }
        hi = lo;
        lo *= 0.5;
    }
    while hi - lo > NORM_REL_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `max (xy − Φ(x) − Φ*(y))` over `pairs`; `−∞` for no pairs.
pub fn young_inequality_check(
    phi: &YoungFunction,
    conj: &YoungFunction,
    pairs: &[(f64, f64)],
) -> f64 {
    pairs
        .iter()
        .map(|&(x, y)| x * y - phi.value(x) - conj.value(y))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileVerdict {
    /// Nonincreasing and the last ratio is strictly below the first.
    Decreasing,
    /// Nonincreasing but flat, e.g. `Φ = t²`.
    Nonincreasing,
    NotMonotone,
    HypothesisNotMet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjugateProfile {
    /// `(k, Φ*(2^{-k})·4^k)` for `k = 1..k_max`; empty when the hypothesis fails.
    pub ratios: Vec<(u32, f64)>,
    pub verdict: ProfileVerdict,
}

impl ConjugateProfile {
    pub fn holds(&self) -> bool {
        self.verdict == ProfileVerdict::Decreasing
    }
}

/// Checks that `Φ*(x)/x²` decreases along `x = 2^{-k}`, after verifying
/// that `Φ(x)/x²` does not decrease as `x ↓ 0`.
pub fn conjugate_profile_check(phi: &YoungFunction, k_max: u32) -> Result<ConjugateProfile> {
    let k0 = (-phi.x_max().log2()).ceil().max(0.0) as i32;
    let hyp: Vec<f64> = (k0..=k0 + 2 * k_max.max(10) as i32)
        .map(|k| phi.value(0.5f64.powi(k)) * 4f64.powi(k))
        .collect();
    if hyp.windows(2).any(|w| w[1] < w[0] * (1.0 - 1e-12)) {
        return Ok(ConjugateProfile {
            ratios: Vec::new(),
            verdict: ProfileVerdict::HypothesisNotMet,
        });
    }
    let ratios: Vec<(u32, f64)> = (1..=k_max)
        .map(|k| {
            Ok((
                k,
                conjugate_at(phi, 0.5f64.powi(k as i32))? * 4f64.powi(k as i32),
            ))
        })
        .collect::<Result<_>>()?;
    let tol = 1e-9;
    let verdict = if ratios.windows(2).any(|w| w[1].1 > w[0].1 + tol) {
        ProfileVerdict::NotMonotone
    } else if ratios.len() >= 2 && ratios.last().unwrap().1 < ratios[0].1 - tol {
        ProfileVerdict::Decreasing
    } else {
        ProfileVerdict::Nonincreasing
    };
    Ok(ConjugateProfile { ratios, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_values() {
        assert_eq!(YoungFunction::power(2.0).unwrap().eval(0.0).unwrap(), 0.0);
        assert_eq!(YoungFunction::power(3.0).unwrap().eval(2.0).unwrap(), 8.0);
        // 0.25·ln(e + 2), evaluated with 40-digit arithmetic
        let v = YoungFunction::power_log(2.0, 1.0)
            .unwrap()
            .eval(0.5)
            .unwrap();
        assert!((v - 0.387_861_178_483_012_77).abs() < 1e-12);
    }

    #[test]
    fn domain_and_shape_errors() {
        let phi = YoungFunction::power(2.0).unwrap();
        assert!(matches!(phi.eval(-1.0), Err(Error::Domain(_))));
        assert!(matches!(phi.eval(17.0), Err(Error::Domain(_))));
        let concave = YoungFunction::tabulated(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 1.5)]);
        assert!(matches!(concave, Err(Error::Precondition(_))));
        assert!(YoungFunction::power(0.5).is_err());
    }

    #[test]
    fn tabulated_interpolates_and_extrapolates() {
        let t = YoungFunction::tabulated(vec![(1.0, 1.0), (2.0, 4.0)]).unwrap();
        assert_eq!(t.value(0.5), 0.5);
        assert_eq!(t.value(1.5), 2.5);
        assert_eq!(t.value(3.0), 7.0);
        assert!(t.eval(3.0).is_err());
    }

    #[test]
    fn doubling_constants() {
        assert_relative_eq!(
            YoungFunction::power(2.0).unwrap().c_dbl(),
            4.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            YoungFunction::power(1.0).unwrap().c_dbl(),
            2.0,
            max_relative = 1e-12
        );
        assert!(YoungFunction::power_log(2.0, 1.0).unwrap().c_dbl() <= 16.0);
    }

    #[test]
    fn conjugate_examples() {
        let sq = YoungFunction::power(2.0).unwrap();
        assert!((conjugate_at(&sq, 1.0).unwrap() - 0.25).abs() < 1e-12);
        let lin = YoungFunction::power(1.0).unwrap();
        assert_eq!(conjugate_at(&lin, 0.5).unwrap(), 0.0);
        assert!(matches!(conjugate_at(&lin, 2.0), Err(Error::Range(_))));
        let cube = YoungFunction::power(3.0).unwrap();
        let expect = 2.0 * (1.0f64 / 3.0).powf(1.5);
        assert!((conjugate_at(&cube, 1.0).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn conjugate_widens_bracket() {
        // argmax y* = x/2 = 20 lies beyond the default domain
        let sq = YoungFunction::power(2.0).unwrap();
        assert_relative_eq!(
            conjugate_at(&sq, 40.0).unwrap(),
            400.0,
            max_relative = 1e-10
        );
    }

    #[test]
    fn closed_form_conjugate_matches_numeric() {
        for p in [1.5, 2.0, 3.0] {
            let phi = YoungFunction::power(p).unwrap();
            let cf = conjugate_function(&phi).unwrap();
            for x in [0.1, 0.7, 1.9] {
                assert!((cf.value(x) - conjugate_at(&phi, x).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn norm_examples() {
        let sq = YoungFunction::power(2.0).unwrap();
        assert_eq!(orlicz_norm(&[C64::new(0.0, 0.0); 3], &sq), 0.0);
        let a = [C64::new(3.0, 0.0), C64::new(0.0, 4.0)];
        assert_relative_eq!(orlicz_norm(&a, &sq), 5.0, max_relative = 1e-9);
        for p in [1.0, 1.5, 4.0] {
            let phi = YoungFunction::power(p).unwrap();
            assert_relative_eq!(
                orlicz_norm(&[C64::new(1.0, 0.0)], &phi),
                1.0,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn profile_verdicts() {
        let sq = conjugate_profile_check(&YoungFunction::power(2.0).unwrap(), 10).unwrap();
        assert_eq!(sq.verdict, ProfileVerdict::Nonincreasing);
        assert!(sq.ratios.iter().all(|r| (r.1 - 0.25).abs() < 1e-12));
        let cube = conjugate_profile_check(&YoungFunction::power(3.0).unwrap(), 10).unwrap();
        assert_eq!(cube.verdict, ProfileVerdict::HypothesisNotMet);
        let pl = conjugate_profile_check(&YoungFunction::power_log(2.0, 1.0).unwrap(), 20).unwrap();
        assert_eq!(pl.verdict, ProfileVerdict::Decreasing);
    }

    #[test]
    fn serde_round_trip() {
        let phi = YoungFunction::power_log(2.0, 1.0).unwrap();
        let s = serde_json::to_string(&phi).unwrap();
        assert!(s.contains("\"family\":\"power-log\""));
        let back: YoungFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, phi);
        let bad: std::result::Result<YoungFunction, _> =
            serde_json::from_str(r#"{"family":"power","params":[0.2]}"#);
        assert!(bad.is_err());
        let seq = CoefficientSequence::from_real(&[1.0, 2.0]).unwrap();
        assert_eq!(
            serde_json::to_string(&seq).unwrap(),
            "[[1.0,0.0],[2.0,0.0]]"
        );
    }
}
