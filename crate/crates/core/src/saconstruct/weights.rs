//! Decreasing weight sequences `(w_n)` for the spaces `ℓ¹_a(w)`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum WeightRule {
    /// `(n + shift)^{−exponent}`
    Power { shift: f64, exponent: f64 },
    /// `ln(n + shift)^{−exponent}`, `shift > 1`
    Log { shift: f64, exponent: f64 },
    /// `ratioⁿ`
    Geometric { ratio: f64 },
    /// explicit `w_0, …, w_{n_max}`
    Table { values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightRepr", into = "WeightRepr")]
pub struct WeightSequence {
    rule: WeightRule,
    n_max: usize,
}

#[derive(Serialize, Deserialize)]
struct WeightRepr {
    #[serde(flatten)]
    rule: WeightRule,
    #[serde(default)]
    n_max: Option<usize>,
}

impl TryFrom<WeightRepr> for WeightSequence {
    type Error = Error;
    fn try_from(r: WeightRepr) -> Result<Self> {
        let n_max = match (&r.rule, r.n_max) {
            (_, Some(n)) => n,
            (WeightRule::Table { values }, None) => values.len().saturating_sub(1),
            (_, None) => return Err(Error::Invalid("rule-based weights need n_max".into())),
        };
        Self::new(r.rule, n_max)
    }
}

impl From<WeightSequence> for WeightRepr {
    fn from(w: WeightSequence) -> Self {
        Self {
            rule: w.rule,
            n_max: Some(w.n_max),
        }
    }
}

impl WeightSequence {
    /// Validates positivity, monotonicity and the decay proxy `w_{n_max} < w_0/10`.
    pub fn new(rule: WeightRule, n_max: usize) -> Result<Self> {
        let bad = |msg: String| Err(Error::Invalid(msg));
        match &rule {
            WeightRule::Power { shift, exponent } => {
                if !(*shift > 0.0 && shift.is_finite() && *exponent > 0.0 && exponent.is_finite()) {
                    return bad(format!(
                        "power weights need shift > 0, exponent > 0 (got {shift}, {exponent})"
                    ));
                }
            }
            WeightRule::Log { shift, exponent } => {
                if !(*shift > 1.0 && shift.is_finite() && *exponent > 0.0 && exponent.is_finite()) {
                    return bad(format!(
                        "log weights need shift > 1, exponent > 0 (got {shift}, {exponent})"
                    ));
                }
            }
            WeightRule::Geometric { ratio } => {
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return bad(format!("geometric ratio {ratio} outside (0, 1)"));
                }
            }
            WeightRule::Table { values } => {
                if values.len() <= n_max {
                    return bad(format!(
                        "table has {} values, n_max = {n_max}",
                        values.len()
                    ));
                }
                if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return bad("table weights must be positive and finite".into());
                }
                if values.windows(2).any(|p| p[1] > p[0]) {
                    return bad("table weights must be nonincreasing".into());
                }
            }
        }
        let w = Self { rule, n_max };
        let (w0, wn) = (w.value(0), w.value(n_max));
        if !(wn > 0.0) {
            return bad(format!("w_{n_max} underflows to zero"));
        }
        if wn >= w0 / 10.0 {
            return bad(format!(
                "decay proxy fails: w_{n_max} = {wn:.4e} ≥ w_0/10 = {:.4e}",
                w0 / 10.0
            ));
        }
        Ok(w)
    }

    pub fn power(shift: f64, exponent: f64, n_max: usize) -> Result<Self> {
        Self::new(WeightRule::Power { shift, exponent }, n_max)
    }

    pub fn geometric(ratio: f64, n_max: usize) -> Result<Self> {
        Self::new(WeightRule::Geometric { ratio }, n_max)
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        let n_max = values.len().saturating_sub(1);
        Self::new(WeightRule::Table { values }, n_max)
    }

    pub fn rule(&self) -> &WeightRule {
        &self.rule
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn is_extensible(&self) -> bool {
        !matches!(self.rule, WeightRule::Table { .. })
    }

    /// Same rule with a larger range; tables cannot grow.
    pub fn extended(&self, n_max: usize) -> Result<Self> {
        if n_max <= self.n_max {
            return Ok(self.clone());
        }
        if !self.is_extensible() {
            return Err(Error::Resource(format!(
                "weight table ends at n = {}, need {n_max}",
                self.n_max
            )));
        }
        Ok(Self {
            rule: self.rule.clone(),
            n_max,
        })
    }

    /// Rule value at `n`; tables return 0 past their end.
    fn value(&self, n: usize) -> f64 {
        let x = n as f64;
        match &self.rule {
            WeightRule::Power { shift, exponent } => (x + shift).powf(-exponent),
            WeightRule::Log { shift, exponent } => (x + shift).ln().powf(-exponent),
            WeightRule::Geometric { ratio } => ratio.powf(x),
            WeightRule::Table { values } => values.get(n).copied().unwrap_or(0.0),
        }
    }

    pub fn weight(&self, n: usize) -> Result<f64> {
        if n > self.n_max {
            return Err(Error::Resource(format!(
                "w_{n} requested beyond n_max = {}",
                self.n_max
            )));
        }
        Ok(self.value(n))
    }

    pub fn values(&self) -> Vec<f64> {
        (0..=self.n_max).map(|n| self.value(n)).collect()
    }
}
