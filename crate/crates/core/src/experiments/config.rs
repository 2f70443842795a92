//! JSON experiment configurations. Every struct rejects unknown fields.

use std::marker::PhantomData;

use serde::de::value::MapAccessDeserializer;
use serde::de::{
    DeserializeOwned, DeserializeSeed, Error as _, IgnoredAny, IntoDeserializer, MapAccess, Visitor,
};
use serde::{Deserialize, Deserializer, Serialize};

use crate::analytic::BoundaryMeasure;
use crate::innerouter::{Profile, RieszProductSpec};
use crate::majorants::{construct_majorant, Majorant};
use crate::orlicz::YoungFunction;
use crate::saconstruct::{SAConfig, WeightSequence};
use crate::{Result, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Conjugate(ConjugateConfig),
    OrliczNorm(OrliczNormConfig),
    Majorant(MajorantConfig),
    SaRun(SaRunConfig),
    ClarkCheck(ClarkConfig),
    RieszDiag(RieszConfig),
    BlochCheck(BlochConfig),
    CyclicRun(CyclicConfig),
    ModelCheck(ModelConfig),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Conjugate(_) => "conjugate",
            Experiment::OrliczNorm(_) => "orlicz-norm",
            Experiment::Majorant(_) => "majorant",
            Experiment::SaRun(_) => "sa-run",
            Experiment::ClarkCheck(_) => "clark-check",
            Experiment::RieszDiag(_) => "riesz-diag",
            Experiment::BlochCheck(_) => "bloch-check",
            Experiment::CyclicRun(_) => "cyclic-run",
            Experiment::ModelCheck(_) => "model-check",
        }
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Experiment::Conjugate(c) => c.name.as_deref(),
            Experiment::OrliczNorm(c) => c.name.as_deref(),
            Experiment::Majorant(c) => c.name.as_deref(),
            Experiment::SaRun(c) => c.name.as_deref(),
            Experiment::ClarkCheck(c) => c.name.as_deref(),
            Experiment::RieszDiag(c) => c.name.as_deref(),
            Experiment::BlochCheck(c) => c.name.as_deref(),
            Experiment::CyclicRun(c) => c.name.as_deref(),
            Experiment::ModelCheck(c) => c.name.as_deref(),
        }
    }

    /// `--grid-m` / `--degree-cap` overrides, for kinds that have such knobs.
    pub fn apply_overrides(&mut self, grid_m: Option<usize>, degree_cap: Option<usize>) {
        match self {
            Experiment::SaRun(c) => {
                if grid_m.is_some() {
                    c.grid_m = grid_m;
                }
                if degree_cap.is_some() {
                    c.degree_cap = degree_cap;
                }
            }
            Experiment::RieszDiag(c) => {
                if let Some(m) = grid_m {
                    c.spec.grid_m = m;
                }
            }
            Experiment::ClarkCheck(c) => {
                if let Some(d) = degree_cap {
                    c.degree = c.degree.min(d);
                }
            }
            Experiment::ModelCheck(c) => {
                if let (Some(m), Some(d)) = (grid_m, c.dbr.as_mut()) {
                    d.grid_m = m;
                }
            }
            _ => {}
        }
    }
}

fn default_x_max() -> f64 {
    2.0
}
fn default_points() -> usize {
    200
}
fn default_brute_points() -> usize {
    100_000
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjugateConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub phi: YoungFunction,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_brute_points")]
    pub brute_force_points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomVectors {
    pub count: usize,
    pub max_len: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrliczNormConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub phi: YoungFunction,
    #[serde(default)]
    pub vectors: Vec<Vec<C64>>,
    #[serde(default)]
    pub random: Option<RandomVectors>,
}

fn default_blocks() -> usize {
    40
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MajorantConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub psi: YoungFunction,
    #[serde(default = "default_blocks")]
    pub n_blocks: usize,
}

/// Every field optional; omitted fields take the reference five-stage
/// configuration with `w_n = (n+2)^{−1/4}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaRunConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub weights: Option<WeightSequence>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub gamma_seq: Option<Vec<f64>>,
    #[serde(default)]
    pub delta_seq: Option<Vec<f64>>,
    #[serde(default)]
    pub epsilon_seq: Option<Vec<f64>>,
    #[serde(default)]
    pub grid_m: Option<usize>,
    #[serde(default)]
    pub degree_cap: Option<usize>,
    #[serde(default)]
    pub transition_factor: Option<f64>,
    #[serde(default)]
    pub tail_tol: Option<f64>,
    #[serde(default)]
    pub k_grid: Option<usize>,
    /// Adds the two-atom pairing columns.
    #[serde(default)]
    pub pairing: bool,
}

pub const REFERENCE_STAGES: usize = 5;

impl SaRunConfig {
    pub fn weights(&self) -> Result<WeightSequence> {
        match &self.weights {
            Some(w) => Ok(w.clone()),
            None => WeightSequence::power(2.0, 0.25, 1 << 20),
        }
    }

    pub fn sa_config(&self) -> SAConfig {
        let gamma = self.gamma_seq.clone().unwrap_or_else(|| {
            (1..=REFERENCE_STAGES as i32)
                .map(|n| 0.5f64.powi(n))
                .collect()
        });
        let delta = self.delta.unwrap_or(0.1);
        let deltas = self.delta_seq.clone().unwrap_or_else(|| {
            (1..=gamma.len() as i32)
                .map(|n| 0.1 * 0.5f64.powi(n))
                .collect()
        });
        let mut c = SAConfig::new(delta, gamma, deltas);
        c.epsilon_seq = self.epsilon_seq.clone();
        if let Some(v) = self.grid_m {
            c.grid_m = v;
        }
        if let Some(v) = self.degree_cap {
            c.degree_cap = v;
        }
        if let Some(v) = self.transition_factor {
            c.transition_factor = v;
        }
        if let Some(v) = self.tail_tol {
            c.tail_tol = v;
        }
        if let Some(v) = self.k_grid {
            c.k_grid = v;
        }
        c
    }
}

fn default_clark_degree() -> usize {
    256
}
fn default_grid_n() -> usize {
    20
}
fn default_radius() -> f64 {
    0.9
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClarkConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub mu: BoundaryMeasure,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_clark_degree")]
    pub degree: usize,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_profile() -> Profile {
    Profile::LogLog
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub spec: RieszProductSpec,
    #[serde(default = "default_profile")]
    pub alpha: Profile,
    #[serde(default = "default_profile")]
    pub beta: Profile,
}

fn default_k_max() -> usize {
    40
}

/// How a majorant `w` is specified in a config.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MajorantSpec {
    Constant {
        value: f64,
        #[serde(default = "default_k_max")]
        k_max: usize,
    },
    Power {
        exponent: f64,
        #[serde(default = "default_k_max")]
        k_max: usize,
    },
    /// The majorant adapted to `Ψ`.
    FromPsi {
        psi: YoungFunction,
        #[serde(default = "default_blocks")]
        n_blocks: usize,
    },
    Nodes {
        majorant: Majorant,
    },
}

impl MajorantSpec {
    pub fn build(&self) -> Result<Majorant> {
        match self {
            MajorantSpec::Constant { value, k_max } => Majorant::constant(*value, *k_max),
            MajorantSpec::Power { exponent, k_max } => Majorant::power(*exponent, *k_max),
            MajorantSpec::FromPsi { psi, n_blocks } => Ok(construct_majorant(psi, *n_blocks)?.0),
            MajorantSpec::Nodes { majorant } => Ok(majorant.clone()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPolynomials {
    pub count: usize,
    pub max_degree: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskGridSpec {
    pub j_max: u32,
    pub per_octave: u32,
    pub n_angles: usize,
}

impl Default for DiskGridSpec {
    fn default() -> Self {
        Self {
            j_max: 12,
            per_octave: 4,
            n_angles: 256,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub w: MajorantSpec,
    /// When present, the `ℓ^Ψ`/Bloch ratio is reported too.
    #[serde(default)]
    pub psi: Option<YoungFunction>,
    #[serde(default)]
    pub polynomials: Vec<Vec<C64>>,
    #[serde(default)]
    pub random: Option<RandomPolynomials>,
    #[serde(default)]
    pub grid: DiskGridSpec,
}

fn default_depth() -> usize {
    4
}
fn default_c1() -> f64 {
    1.0
}
fn default_r_list() -> Vec<f64> {
    vec![0.9, 0.99, 0.999]
}
fn default_quotient_degree() -> usize {
    512
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclicConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub w: MajorantSpec,
    #[serde(default = "default_c1")]
    pub c1: f64,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_r_list")]
    pub r_list: Vec<f64>,
    #[serde(default = "default_quotient_degree")]
    pub quotient_degree: usize,
}

fn default_phi() -> YoungFunction {
    YoungFunction::power(2.0).expect("t² is a Young function")
}
fn default_dbr_stages() -> usize {
    3
}
fn default_dbr_grid() -> usize {
    1 << 14
}
fn default_dbr_trunc() -> usize {
    256
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DbrSpec {
    /// SA run providing `K` and the polynomials; a feasible default is used
    /// when omitted.
    #[serde(default)]
    pub sa: Option<SaRunConfig>,
    #[serde(default = "default_dbr_stages")]
    pub stages: usize,
    #[serde(default = "default_dbr_grid")]
    pub grid_m: usize,
    #[serde(default = "default_dbr_trunc")]
    pub trunc: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub zeros: Vec<C64>,
    #[serde(default = "default_phi")]
    pub phi: YoungFunction,
    #[serde(default)]
    pub trunc_n: Option<usize>,
    #[serde(default)]
    pub dbr: Option<DbrSpec>,
}

/// A geometric-weight SA run that completes at desk scale: `w_n = 2^{−n}`,
/// `δ = 0.9`, `δ_n = 0.18`, `γ_n = 0.55ⁿ`.
pub fn feasible_sa_run(stages: usize) -> SaRunConfig {
    SaRunConfig {
        weights: Some(WeightSequence::geometric(0.5, 1000).expect("valid geometric weights")),
        delta: Some(0.9),
        gamma_seq: Some((1..=stages as i32).map(|n| 0.55f64.powi(n)).collect()),
        delta_seq: Some(vec![0.9 / REFERENCE_STAGES as f64; stages]),
        ..SaRunConfig::default()
    }
}

#[derive(Deserialize)]
struct KindProbe {
    kind: Option<String>,
}

/// Forwards every entry except the top-level `kind` tag.
struct SkipKind<A>(A);

impl<'de, A: MapAccess<'de>> MapAccess<'de> for SkipKind<A> {
    type Error = A::Error;

    fn next_key_seed<K: DeserializeSeed<'de>>(
        &mut self,
        seed: K,
    ) -> std::result::Result<Option<K::Value>, A::Error> {
        loop {
            match self.0.next_key::<String>()? {
                None => return Ok(None),
                Some(k) if k == "kind" => {
                    self.0.next_value::<IgnoredAny>()?;
                }
                Some(k) => return seed.deserialize(k.into_deserializer()).map(Some),
            }
        }
    }

    fn next_value_seed<V: DeserializeSeed<'de>>(
        &mut self,
        seed: V,
    ) -> std::result::Result<V::Value, A::Error> {
        self.0.next_value_seed(seed)
    }
}

struct Untagged<T>(PhantomData<T>);

impl<'de, T: Deserialize<'de>> Visitor<'de> for Untagged<T> {
    type Value = T;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("an experiment object")
    }

    fn visit_map<A: MapAccess<'de>>(self, map: A) -> std::result::Result<T, A::Error> {
        T::deserialize(MapAccessDeserializer::new(SkipKind(map)))
    }
}

fn parse_as<T: DeserializeOwned>(text: &str) -> serde_json::Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let v = de.deserialize_map(Untagged(PhantomData))?;
    de.end()?;
    Ok(v)
}

pub const KINDS: [&str; 9] = [
    "conjugate",
    "orlicz-norm",
    "majorant",
    "sa-run",
    "clark-check",
    "riesz-diag",
    "bloch-check",
    "cyclic-run",
    "model-check",
];

pub fn parse_experiment(text: &str) -> serde_json::Result<Experiment> {
    let probe: KindProbe = serde_json::from_str(text)?;
    let kind = probe
        .kind
        .ok_or_else(|| serde_json::Error::custom("missing field `kind`"))?;
    Ok(match kind.as_str() {
        "conjugate" => Experiment::Conjugate(parse_as(text)?),
        "orlicz-norm" => Experiment::OrliczNorm(parse_as(text)?),
        "majorant" => Experiment::Majorant(parse_as(text)?),
        "sa-run" => Experiment::SaRun(parse_as(text)?),
        "clark-check" => Experiment::ClarkCheck(parse_as(text)?),
        "riesz-diag" => Experiment::RieszDiag(parse_as(text)?),
        "bloch-check" => Experiment::BlochCheck(parse_as(text)?),
        "cyclic-run" => Experiment::CyclicRun(parse_as(text)?),
        "model-check" => Experiment::ModelCheck(parse_as(text)?),
        other => return Err(serde_json::Error::unknown_variant(other, &KINDS)),
    })
}
