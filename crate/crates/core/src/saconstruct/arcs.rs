//! Finite unions of closed arcs on the circle with exact rational endpoints.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sorted, pairwise disjoint closed arcs `[start, end] ⊂ [0, 1]` (turns).
/// An arc through angle 0 is stored as two pieces `[s, 1]` and `[0, e]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ArcSetRepr", into = "ArcSetRepr")]
pub struct ArcSet {
    arcs: Vec<(BigRational, BigRational)>,
}

#[derive(Serialize, Deserialize)]
struct ArcSetRepr {
    #[serde(default)]
    arcs: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measure: Option<f64>,
    /// Endpoints as `"p/q"` strings; authoritative when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<Vec<[String; 2]>>,
}

impl From<ArcSet> for ArcSetRepr {
    fn from(a: ArcSet) -> Self {
        Self {
            arcs: a.to_f64(),
            measure: Some(a.measure_f64()),
            exact: Some(
                a.arcs
                    .iter()
                    .map(|(s, e)| [s.to_string(), e.to_string()])
                    .collect(),
            ),
        }
    }
}

impl TryFrom<ArcSetRepr> for ArcSet {
    type Error = Error;
    fn try_from(r: ArcSetRepr) -> Result<Self> {
        let pieces = match r.exact {
            Some(exact) => exact
                .iter()
                .map(|[s, e]| Ok((parse_ratio(s)?, parse_ratio(e)?)))
                .collect::<Result<Vec<_>>>()?,
            None => r
                .arcs
                .iter()
                .map(|&[s, e]| Ok((ratio_from_f64(s)?, ratio_from_f64(e)?)))
                .collect::<Result<Vec<_>>>()?,
        };
        ArcSet::from_arcs(pieces)
    }
}

fn parse_ratio(s: &str) -> Result<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|e| Error::Invalid(format!("bad rational {s:?}: {e}")))
}

/// Exact binary value of a finite float.
pub fn ratio_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Invalid(format!("non-finite angle {x}")))
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `x mod 1` into `[0, 1)`.
fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

impl ArcSet {
    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        Self {
            arcs: vec![(BigRational::zero(), BigRational::one())],
        }
    }

    /// Arcs with `0 ≤ start ≤ end ≤ 1`; degenerate arcs are dropped,
    /// overlapping or touching arcs merged.
    pub fn from_arcs(pieces: Vec<(BigRational, BigRational)>) -> Result<Self> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        for (s, e) in &pieces {
            if s < &zero || e > &one || s > e {
                return Err(Error::Invalid(format!(
                    "arc [{s}, {e}] is not inside [0, 1]"
                )));
            }
        }
        Ok(Self::normalized(pieces))
    }

    fn normalized(mut pieces: Vec<(BigRational, BigRational)>) -> Self {
        pieces.retain(|(s, e)| s < e);
        pieces.sort_by(|a, b| a.0.cmp(&b.0));
        let mut arcs: Vec<(BigRational, BigRational)> = Vec::with_capacity(pieces.len());
        for (s, e) in pieces {
            match arcs.last_mut() {
                Some(last) if s <= last.1 => {
                    if e > last.1 {
                        last.1 = e;
                    }
                }
                _ => arcs.push((s, e)),
            }
        }
        Self { arcs }
    }

    /// Closed arc of the given length centred at `center` (any real, taken mod 1).
    pub fn centered(center: &BigRational, length: &BigRational) -> Result<Self> {
        if length.is_zero() {
            return Ok(Self::empty());
        }
        if length < &BigRational::zero() || length > &BigRational::one() {
            return Err(Error::Invalid(format!(
                "arc length {length} outside [0, 1]"
            )));
        }
        if length.is_one() {
            return Ok(Self::full());
        }
        let half = length / BigInt::from(2);
        let start = frac(&(center - &half));
        Ok(Self::normalized(wrap_piece(start, length)))
    }

    /// Union of `m` arcs of length `length/m` centred at `k/m + center/m`:
    /// the preimage under `ζ ↦ ζ^m` of the arc of the given length at `center`.
    pub fn preimage_under_power(
        center: &BigRational,
        length: &BigRational,
        m: u64,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("power must be ≥ 1".into()));
        }
        if length < &BigRational::zero() || length > &BigRational::one() {
            return Err(Error::Invalid(format!(
                "arc length {length} outside [0, 1]"
            )));
        }
        if length.is_one() {
            return Ok(Self::full());
        }
        let mb = BigInt::from(m);
        let piece = length / &mb;
        let first = frac(&((center - length / BigInt::from(2)) / &mb));
        let mut pieces = Vec::with_capacity(m as usize + 1);
        for k in 0..m {
            let start = frac(&(&first + BigRational::new(BigInt::from(k), mb.clone())));
            pieces.extend(wrap_piece(start, &piece));
        }
        Ok(Self::normalized(pieces))
    }

    pub fn arcs(&self) -> &[(BigRational, BigRational)] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn to_f64(&self) -> Vec<[f64; 2]> {
        self.arcs
            .iter()
            .map(|(s, e)| [to_f64(s), to_f64(e)])
            .collect()
    }

    pub fn measure(&self) -> BigRational {
        self.arcs
            .iter()
            .fold(BigRational::zero(), |acc, (s, e)| acc + (e - s))
    }

    pub fn measure_f64(&self) -> f64 {
        to_f64(&self.measure())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.arcs, &other.arcs);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = (&a[i].0).max(&b[j].0);
            let hi = (&a[i].1).min(&b[j].1);
            if lo <= hi {
                out.push((lo.clone(), hi.clone()));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        // single-point contacts are dropped: they carry no measure
        Self::normalized(out)
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::normalized(self.arcs.iter().chain(&other.arcs).cloned().collect())
    }

    /// Closed-arc membership of the angle `theta` (taken mod 1).
    pub fn contains(&self, theta: &BigRational) -> bool {
        let t = frac(theta);
        let idx = self.arcs.partition_point(|(s, _)| s <= &t);
        let hit = idx > 0 && t <= self.arcs[idx - 1].1;
        // angle 0 and angle 1 are the same point
        hit || (t.is_zero() && self.arcs.last().is_some_and(|(_, e)| e.is_one()))
    }

    pub fn contains_f64(&self, theta: f64) -> bool {
        ratio_from_f64(theta).is_ok_and(|t| self.contains(&t))
    }

    /// Membership of the grid angles `j/m`, `j < m`, decided exactly.
    pub fn grid_mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        let mb = BigInt::from(m);
        for (s, e) in &self.arcs {
            // smallest j with j/m ≥ s and largest with j/m ≤ e
            let lo = (s * &mb).ceil().to_integer();
            let hi = (e * &mb).floor().to_integer();
            let (Some(lo), Some(hi)) = (lo.to_i64(), hi.to_i64()) else {
                continue;
            };
            for j in lo.max(0)..=hi {
                mask[(j as usize) % m] = true;
            }
        }
        mask
    }
}

fn wrap_piece(start: BigRational, length: &BigRational) -> Vec<(BigRational, BigRational)> {
    let end = &start + length;
    let one = BigRational::one();
    if end > one {
        vec![(start, one.clone()), (BigRational::zero(), end - one)]
    } else {
        vec![(start, end)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_wraps_through_zero() {
        let a = ArcSet::centered(&ratio(0, 1), &ratio(1, 5)).unwrap();
        assert_eq!(
            a.arcs(),
            &[(ratio(0, 1), ratio(1, 10)), (ratio(9, 10), ratio(1, 1))]
        );
        assert_eq!(a.measure(), ratio(1, 5));
        assert!(a.contains(&ratio(0, 1)) && a.contains(&ratio(1, 1)) && a.contains(&ratio(-1, 20)));
        assert!(!a.contains(&ratio(1, 2)));
    }

    #[test]
    fn preimage_measure_is_exact() {
        let e = ArcSet::preimage_under_power(&ratio(0, 1), &ratio(9, 10), 7).unwrap();
        assert_eq!(e.measure(), ratio(9, 10));
        for k in 0..7 {
            assert!(e.contains(&ratio(k, 7)));
        }
        assert_eq!(
            ArcSet::preimage_under_power(&ratio(0, 1), &ratio(1, 2), 1).unwrap(),
            ArcSet::centered(&ratio(0, 1), &ratio(1, 2)).unwrap()
        );
    }

    #[test]
    fn algebra() {
        let a = ArcSet::from_arcs(vec![(ratio(0, 1), ratio(1, 2))]).unwrap();
        let b = ArcSet::from_arcs(vec![(ratio(1, 4), ratio(3, 4))]).unwrap();
        assert_eq!(a.intersect(&b).measure(), ratio(1, 4));
        assert_eq!(a.union(&b).measure(), ratio(3, 4));
        assert_eq!(a.intersect(&ArcSet::full()), a);
        assert!(a.intersect(&ArcSet::empty()).is_empty());
        let touch = ArcSet::from_arcs(vec![(ratio(1, 2), ratio(1, 1))]).unwrap();
        assert_eq!(a.intersect(&touch).measure(), ratio(0, 1));
        assert!(ArcSet::from_arcs(vec![(ratio(1, 2), ratio(1, 4))]).is_err());
    }

    #[test]
    fn grid_mask_matches_contains() {
        let e = ArcSet::preimage_under_power(&ratio(0, 1), &ratio(4, 5), 3).unwrap();
        let mask = e.grid_mask(64);
        for (j, &inside) in mask.iter().enumerate() {
            assert_eq!(inside, e.contains(&ratio(j as i64, 64)), "j = {j}");
        }
    }

    #[test]
    fn serde_round_trip() {
        let e = ArcSet::preimage_under_power(&ratio(0, 1), &ratio(2, 3), 5).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        let back: ArcSet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        let floats: ArcSet = serde_json::from_str(r#"{"arcs": [[0.25, 0.5]]}"#).unwrap();
        assert_eq!(floats.measure(), ratio(1, 4));
    }
}
