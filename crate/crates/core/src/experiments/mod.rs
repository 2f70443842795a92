//! Named experiments: JSON config in, `results.csv` + `summary.json` +
//! `manifest.json` out.
//!
//! Exit-code contract used by the binary: schema and I/O problems map to 2,
//! numeric module errors to 3.

pub mod config;
pub mod output;
pub mod report;

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analytic::TaylorSeries;
use crate::bloch::{
    cyclicity_diagnostic, embedding_report, fourier_bound_report, DiskGrid, MonotoneTable,
};
use crate::innerouter::{
    clark_b_from_mu, cyclic_inner_candidate, kernel_identity_grid, loglog_profile,
    riesz_product_with_profiles,
};
use crate::majorants::{construct_majorant, majorant_regularity_check};
use crate::modelspace::{dbr_pairing_demo, dualcyc_gap, model_space_basis, FiniteBlaschke};
use crate::orlicz::{conjugate_at, orlicz_norm, Family, YoungFunction};
use crate::saconstruct::{normalized_two_atom, pairing_annihilation_demo, sa_pipeline};
use crate::{Error, C64};

pub use config::*;
pub use output::{Cell, Outcome, Table};

pub const TOOL: &str = "cauchy-coeffs";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable read by the binary for the worker-thread count.
pub const THREADS_ENV: &str = "CAUCHY_COEFFS_THREADS";

/// Note printed with every conjugate computation.
pub const SUP_NOTE: &str =
    "conjugates are computed as Φ*(x) = sup_y (xy − Φ(y)); an inf in this definition would be identically −∞ or 0";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Schema(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Numeric(#[from] Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Schema(_) | RunError::Io(_) => 2,
            RunError::Numeric(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub grid_m: Option<usize>,
    pub degree_cap: Option<usize>,
}

/// Reads `kind` first, then streams the document into that kind's struct so
/// that every error keeps its `line L column C`.
pub fn parse_config(text: &str) -> Result<Experiment, RunError> {
    config::parse_experiment(text).map_err(|e| RunError::Schema(e.to_string()))
}

pub fn run_config_str(text: &str, overrides: Overrides) -> Result<(Experiment, Outcome), RunError> {
    let mut exp = parse_config(text)?;
    exp.apply_overrides(overrides.grid_m, overrides.degree_cap);
    let outcome = run_experiment(&exp)?;
    Ok((exp, outcome))
}

/// Parse, run and write the three artifacts into `out_dir`.
pub fn run_to_dir(
    config_path: &Path,
    out_dir: &Path,
    overrides: Overrides,
) -> Result<Outcome, RunError> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| RunError::Io(format!("{}: {e}", config_path.display())))?;
    let (exp, outcome) = run_config_str(&text, overrides)?;
    write_artifacts(&exp, &outcome, out_dir)?;
    Ok(outcome)
}

/// In-memory variant of [`run_to_dir`]: one JSON document with `summary`,
/// `manifest` and the CSV text under `results_csv`.
pub fn run_config_json(text: &str, overrides: Overrides) -> Result<String, RunError> {
    let (exp, outcome) = run_config_str(text, overrides)?;
    let csv = outcome
        .table
        .to_csv()
        .map_err(|e| RunError::Io(e.to_string()))?;
    let doc = json!({
        "summary": outcome.summary,
        "manifest": manifest(&exp, &outcome),
        "results_csv": String::from_utf8_lossy(&csv),
    });
    Ok(doc.to_string())
}

pub fn manifest(exp: &Experiment, outcome: &Outcome) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "kind": exp.kind(),
        "name": exp.name(),
        "config": exp,
        "parameters": outcome.parameters,
        "notes": outcome.notes,
    })
}

pub fn write_artifacts(exp: &Experiment, outcome: &Outcome, dir: &Path) -> Result<(), RunError> {
    let io = |e: std::io::Error| RunError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    output::write_atomic(dir, "results.csv", &outcome.table.to_csv().map_err(io)?).map_err(io)?;
    output::write_atomic(
        dir,
        "summary.json",
        &output::pretty_json(&Value::Object(outcome.summary.clone())),
    )
    .map_err(io)?;
    for (name, v) in &outcome.extras {
        output::write_atomic(dir, name, &output::pretty_json(v)).map_err(io)?;
    }
    output::write_atomic(
        dir,
        "manifest.json",
        &output::pretty_json(&manifest(exp, outcome)),
    )
    .map_err(io)
}

pub fn run_experiment(exp: &Experiment) -> crate::Result<Outcome> {
    match exp {
        Experiment::Conjugate(c) => run_conjugate(c),
        Experiment::OrliczNorm(c) => run_orlicz_norm(c),
        Experiment::Majorant(c) => run_majorant(c),
        Experiment::SaRun(c) => run_sa(c),
        Experiment::ClarkCheck(c) => run_clark(c),
        Experiment::RieszDiag(c) => run_riesz(c),
        Experiment::BlochCheck(c) => run_bloch(c),
        Experiment::CyclicRun(c) => run_cyclic(c),
        Experiment::ModelCheck(c) => run_model(c),
    }
}

/// `(p, c)` when `Φ = c·t^p` with `p > 1`.
fn power_params(phi: &YoungFunction) -> Option<(f64, f64)> {
    (phi.family() == Family::Power && phi.params()[0] > 1.0)
        .then(|| (phi.params()[0], phi.params().get(1).copied().unwrap_or(1.0)))
}

/// `(c·t^p)*(x) = (p − 1)·c·(x/(pc))^{p/(p−1)}`.
pub fn power_conjugate_closed_form(p: f64, c: f64, x: f64) -> f64 {
    (p - 1.0) * c * (x / (p * c)).powf(p / (p - 1.0))
}

/// `max_i (x t_i − Φ(t_i))` over `points + 1` equispaced `t_i ∈ [0, T]`,
/// with `T` doubled until `xT < Φ(T)`.
pub fn brute_force_conjugate(phi: &YoungFunction, x: f64, points: usize) -> f64 {
    let mut t_top = 1.0;
    while x * t_top >= phi.value(t_top) && t_top < 1e12 {
        t_top *= 2.0;
    }
    (0..=points)
        .map(|i| {
            let t = t_top * i as f64 / points as f64;
            x * t - phi.value(t)
        })
        .fold(0.0, f64::max)
}

fn run_conjugate(c: &ConjugateConfig) -> crate::Result<Outcome> {
    if c.points == 0 || !(c.x_max > 0.0) || c.brute_force_points == 0 {
        return Err(Error::Invalid(
            "points, brute_force_points and x_max must be positive".into(),
        ));
    }
    let closed = power_params(&c.phi);
    let rows: Vec<(f64, f64, Option<f64>, f64)> = (1..=c.points)
        .into_par_iter()
        .map(|i| {
            let x = c.x_max * i as f64 / c.points as f64;
            let numeric = conjugate_at(&c.phi, x)?;
            let exact = closed.map(|(p, k)| power_conjugate_closed_form(p, k, x));
            Ok((
                x,
                numeric,
                exact,
                brute_force_conjugate(&c.phi, x, c.brute_force_points),
            ))
        })
        .collect::<crate::Result<_>>()?;
    let mut out = Outcome::default();
    out.table = Table::new(&[
        "stage",
        "x",
        "numeric",
        "closed_form",
        "brute_force",
        "err_closed",
        "err_brute",
    ]);
    let (mut max_closed, mut max_brute) = (None::<f64>, 0.0f64);
    for (i, (x, v, e, b)) in rows.iter().enumerate() {
        let err_closed = e.map(|e| (v - e).abs());
        if let Some(d) = err_closed {
            max_closed = Some(max_closed.unwrap_or(0.0).max(d));
        }
        max_brute = max_brute.max((v - b).abs());
        out.table.push(vec![
            (i + 1).into(),
            (*x).into(),
            (*v).into(),
            (*e).into(),
            (*b).into(),
            err_closed.into(),
            (v - b).abs().into(),
        ]);
    }
    out.summary_value("max_err_closed_form", max_closed);
    out.summary_value("max_err_brute_force", max_brute);
    out.parameter("points", c.points);
    out.parameter("x_max", c.x_max);
    out.parameter("brute_force_points", c.brute_force_points);
    out.parameter("ternary_tolerance", crate::orlicz::TERNARY_TOL);
    out.notes.push(SUP_NOTE.into());
    Ok(out)
}

/// `‖a‖_p` with compensated scaling.
fn lp_norm(a: &[C64], p: f64) -> f64 {
    let m = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    m * a
        .iter()
        .map(|z| (z.norm() / m).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

pub fn random_vectors(count: usize, max_len: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.max(1));
            (0..len)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect()
}

fn run_orlicz_norm(c: &OrliczNormConfig) -> crate::Result<Outcome> {
    let mut vectors = c.vectors.clone();
    if let Some(r) = &c.random {
        vectors.extend(random_vectors(r.count, r.max_len, r.seed));
    }
    if vectors.is_empty() {
        return Err(Error::Invalid(
            "no vectors: give `vectors` or `random`".into(),
        ));
    }
    // ℓ^p oracle for c·t^p, p ≥ 1: ‖a‖ = c^{1/p}‖a‖_p.
    let oracle = (c.phi.family() == Family::Power && c.phi.params()[0] >= 1.0).then(|| {
        (
            c.phi.params()[0],
            c.phi.params().get(1).copied().unwrap_or(1.0),
        )
    });
    let mut out = Outcome::default();
    out.table = Table::new(&["stage", "len", "orlicz_norm", "lp_norm", "rel_err"]);
    let mut worst = None::<f64>;
    for (i, v) in vectors.iter().enumerate() {
        let norm = orlicz_norm(v, &c.phi);
        let exact = oracle.map(|(p, k)| k.powf(1.0 / p) * lp_norm(v, p));
        let rel = exact.map(|e| if e == 0.0 { norm } else { (norm - e).abs() / e });
        if let Some(r) = rel {
            worst = Some(worst.unwrap_or(0.0).max(r));
        }
        out.table.push(vec![
            i.into(),
            v.len().into(),
            norm.into(),
            exact.into(),
            rel.into(),
        ]);
    }
    out.summary_value("vectors", vectors.len());
    out.summary_value("max_rel_err", worst);
    out.parameter("bisection_rel_width", crate::orlicz::NORM_REL_WIDTH);
    if let Some(r) = &c.random {
        out.parameter("seed", r.seed);
    }
    Ok(out)
}

fn run_majorant(c: &MajorantConfig) -> crate::Result<Outcome> {
    let (w, trace) = construct_majorant(&c.psi, c.n_blocks)?;
    let reg = majorant_regularity_check(&w);
    let mut out = Outcome::default();
    out.table = Table::new(&["stage", "t_n", "w_level", "psi_of_w"]);
    let rows = trace.t.len().max(w.levels().len());
    for n in 1..=rows {
        let t = trace.t.get(n - 1).copied();
        let level = w.levels().get(n).copied();
        out.table.push(vec![
            n.into(),
            t.into(),
            level.into(),
            level.map(|l| c.psi.value(l)).into(),
        ]);
    }
    out.summary_value("n0", trace.n0);
    out.summary_value("dini_crossing", trace.dini_crossing);
    out.summary_value("max_sequence_ratio", trace.max_sequence_ratio);
    out.summary_value("interleaved", trace.interleaved);
    out.summary_value("block_sizes", &trace.block_sizes);
    out.summary_value("block_sums", &trace.block_sums);
    out.summary_value("alpha_block_sums", &trace.alpha_block_sums);
    out.summary_value("regularity", &reg);
    out.summary_value("majorant", &w);
    out.summary_value("warnings", &trace.warnings);
    out.parameter("n_blocks", c.n_blocks);
    Ok(out)
}

/// Two atoms in different components of `K`: the first arc and the middle
/// one (first and last may be the two halves of an arc through 0).
fn pairing_atoms(k: &crate::saconstruct::ArcSet) -> Option<(f64, f64)> {
    let arcs = k.to_f64();
    let first = arcs.first()?;
    let a = 0.5 * (first[0] + first[1]);
    let b = match arcs.get(arcs.len() / 2) {
        Some(mid) if arcs.len() > 2 => 0.5 * (mid[0] + mid[1]),
        _ => 0.5 * (a + first[1]),
    };
    (b > a).then_some((a, b - a))
}

fn run_sa(c: &SaRunConfig) -> crate::Result<Outcome> {
    let w = c.weights()?;
    let cfg = c.sa_config();
    let witness = sa_pipeline(&w, &cfg)?;

    let pairings = if c.pairing {
        let (theta, gap) = pairing_atoms(&witness.k)
            .ok_or_else(|| Error::Geometry("K has no room for two distinct atoms".into()))?;
        let d_max = witness
            .lifts
            .iter()
            .map(|l| l.series.degree())
            .max()
            .unwrap_or(0);
        let mu = normalized_two_atom(theta, gap, &w, d_max)?;
        let reps = witness
            .lifts
            .iter()
            .map(|l| pairing_annihilation_demo(&mu, &l.series, &w, 0, &witness.k))
            .collect::<crate::Result<Vec<_>>>()?;
        Some((theta, gap, reps))
    } else {
        None
    };

    let mut cols = vec![
        "stage",
        "gamma",
        "delta",
        "epsilon",
        "m_n",
        "N_n",
        "f_degree",
        "lift_degree",
        "f0_raw",
        "arc_deviation",
        "l1w_norm",
        "l1w_bound",
        "l1w_slack",
        "supK_dev",
        "supE_dev",
        "K_measure",
        "K_measure_exact",
    ];
    if pairings.is_some() {
        cols.extend(["pairing", "pairing_bound", "pairing_agreement"]);
    }
    let mut out = Outcome::default();
    out.table = Table::new(&cols);
    for (i, s) in witness.stages.iter().enumerate() {
        let mut row: Vec<Cell> = vec![
            s.n.into(),
            s.gamma.into(),
            s.delta.into(),
            s.epsilon.into(),
            s.m.into(),
            s.n_value.into(),
            s.f_degree.into(),
            s.lift_degree.into(),
            s.f0_raw.into(),
            s.arc_deviation.into(),
            s.l1w_norm.into(),
            s.l1w_bound.into(),
            s.l1w_slack.into(),
            s.sup_k_dev.into(),
            s.sup_e_dev.into(),
            s.k_measure.into(),
            s.k_measure_exact.as_str().into(),
        ];
        if let Some((_, _, reps)) = &pairings {
            let r = &reps[i];
            row.extend([r.value.into(), r.bound.into(), r.agreement.into()]);
        }
        out.table.push(row);
    }
    let final_measure = witness.k.measure_f64();
    out.summary_value("all_hold", witness.all_hold());
    out.summary_value("measure_ok", witness.measure_ok);
    out.summary_value("stages", witness.stages.len());
    out.summary_value("l1w_ok", witness.stages.iter().all(|s| s.l1w_ok()));
    out.summary_value("sup_ok", witness.stages.iter().all(|s| s.sup_ok()));
    out.summary_value("K_measure", final_measure);
    out.summary_value("K_measure_exact", witness.k.measure().to_string());
    out.summary_value("K_arcs", witness.k.len());
    if let Some((theta, gap, reps)) = &pairings {
        let first = reps.first().map_or(0.0, |r| r.value);
        let last = reps.last().map_or(0.0, |r| r.value);
        out.summary_value("pairing_atoms", [theta, &(theta + gap)]);
        out.summary_value(
            "pairing_decay",
            if last > 0.0 {
                first / last
            } else {
                f64::INFINITY
            },
        );
        out.summary_value(
            "pairing_within_bound",
            reps.iter().all(|r| r.value <= r.bound * (1.0 + 1e-12)),
        );
        out.summary_value(
            "pairing_max_agreement",
            reps.iter().map(|r| r.agreement).fold(0.0, f64::max),
        );
    }
    out.extras.push((
        "k.json".into(),
        serde_json::to_value(&witness.k).unwrap_or(Value::Null),
    ));
    out.parameter("grid_m", cfg.grid_m);
    out.parameter("degree_cap", cfg.degree_cap);
    out.parameter("k_grid", cfg.k_grid);
    out.parameter("transition_factor", cfg.transition_factor);
    out.parameter("tail_tol", cfg.tail_tol);
    out.parameter("delta", cfg.delta);
    out.parameter("gamma_seq", &cfg.gamma_seq);
    out.parameter("delta_seq", &cfg.delta_seq);
    out.parameter("epsilon_seq", cfg.epsilons());
    out.parameter("weights", &w);
    out.notes
        .push("m(K) < 1 holds automatically since the δ_n are positive".into());
    Ok(out)
}

fn run_clark(c: &ClarkConfig) -> crate::Result<Outcome> {
    let pair = clark_b_from_mu(&c.mu, c.alpha, c.degree)?;
    let max_residual = kernel_identity_grid(&pair, c.grid_n, c.radius)?;
    let mut out = Outcome::default();
    out.table = Table::new(&["stage", "re", "im", "abs"]);
    for (n, b) in pair
        .b
        .coeffs()
        .iter()
        .enumerate()
        .take(c.degree.min(64) + 1)
    {
        out.table
            .push(vec![n.into(), b.re.into(), b.im.into(), b.norm().into()]);
    }
    out.summary_value("max_residual", max_residual);
    out.summary_value("mu_mass", c.mu.total_mass().re);
    out.summary_value("b_degree", pair.b.degree());
    out.parameter("degree", c.degree);
    out.parameter("grid_n", c.grid_n);
    out.parameter("radius", c.radius);
    out.notes.push("kernel identity checked as K(κ_λ dμ)(z)(1 − conj b(λ))(1 − b(z)) = (1 − conj b(λ) b(z))/(1 − λ̄z)".into());
    Ok(out)
}

fn run_riesz(c: &RieszConfig) -> crate::Result<Outcome> {
    let (alpha, beta) = (c.alpha.clone(), c.beta.clone());
    let (mu, diag) = riesz_product_with_profiles(&c.spec, |t| alpha.eval(t), |t| beta.eval(t))?;
    let mut out = Outcome::default();
    out.table = Table::new(&["stage", "arc_j", "arc_k", "ratio1", "ratio2"]);
    for (i, r) in diag.rows.iter().enumerate() {
        out.table.push(vec![
            i.into(),
            r.arc_j.into(),
            r.arc_k.into(),
            r.ratio1.into(),
            r.ratio2.into(),
        ]);
    }
    let mass = mu.total_mass().re;
    out.summary_value("mass", mass);
    out.summary_value("mass_error", (mass - 1.0).abs());
    out.summary_value("max_ratio1", diag.max_ratio1);
    out.summary_value("max_ratio2", diag.max_ratio2);
    out.summary_value("within_reference1", diag.within_reference1);
    out.summary_value("within_reference2", diag.within_reference2);
    out.parameter("grid_m", c.spec.grid_m);
    out.parameter("depth", c.spec.depth());
    Ok(out)
}

pub fn random_polynomials(
    count: usize,
    max_degree: usize,
    seed: u64,
) -> crate::Result<Vec<TaylorSeries>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let d = rng.gen_range(1..=max_degree.max(1));
            let coeffs = (0..=d)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            TaylorSeries::new(coeffs)
        })
        .collect()
}

fn run_bloch(c: &BlochConfig) -> crate::Result<Outcome> {
    let w = c.w.build()?;
    let grid = DiskGrid::refined(c.grid.j_max, c.grid.per_octave, c.grid.n_angles);
    let mut polys = c
        .polynomials
        .iter()
        .map(|p| TaylorSeries::new(p.clone()))
        .collect::<crate::Result<Vec<_>>>()?;
    if let Some(r) = &c.random {
        polys.extend(random_polynomials(r.count, r.max_degree, r.seed)?);
    }
    if polys.is_empty() {
        return Err(Error::Invalid(
            "no polynomials: give `polynomials` or `random`".into(),
        ));
    }
    let reports: Vec<_> = polys
        .par_iter()
        .map(|f| {
            let fb = fourier_bound_report(f, &w, &grid);
            let emb = c
                .psi
                .as_ref()
                .map(|psi| embedding_report(f, &w, psi, &grid));
            (fb, emb)
        })
        .collect();
    let mut out = Outcome::default();
    out.table = Table::new(&[
        "stage",
        "degree",
        "bloch_norm",
        "max_ratio",
        "max_coeff_ratio",
        "holds",
        "orlicz_norm",
        "embedding_ratio",
    ]);
    for (i, (f, (fb, emb))) in polys.iter().zip(&reports).enumerate() {
        out.table.push(vec![
            i.into(),
            f.degree().into(),
            fb.norm.into(),
            fb.max_ratio.into(),
            fb.max_coeff_ratio.into(),
            fb.holds.into(),
            emb.as_ref().map(|e| e.orlicz_norm).into(),
            emb.as_ref().and_then(|e| e.ratio).into(),
        ]);
    }
    out.summary_value(
        "max_ratio",
        reports.iter().map(|r| r.0.max_ratio).fold(0.0, f64::max),
    );
    out.summary_value("all_hold", reports.iter().all(|r| r.0.holds));
    let ratios: Vec<f64> = reports.iter().filter_map(|r| r.1.as_ref()?.ratio).collect();
    if !ratios.is_empty() {
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        out.summary_value("embedding_max", hi);
        out.summary_value("embedding_spread", hi / lo);
    }
    out.summary_value("regularity", majorant_regularity_check(&w));
    out.parameter("grid_radii", grid.radii().len());
    out.parameter("grid_j_max", c.grid.j_max);
    out.parameter("grid_per_octave", c.grid.per_octave);
    out.parameter("grid_angles", grid.n_angles());
    out.parameter("fourier_bound", crate::bloch::FOURIER_BOUND);
    if let Some(r) = &c.random {
        out.parameter("seed", r.seed);
    }
    Ok(out)
}

fn run_cyclic(c: &CyclicConfig) -> crate::Result<Outcome> {
    let w = c.w.build()?;
    let cand = cyclic_inner_candidate(&w, c.c1, c.depth)?;
    let c1 = c.c1;
    let u = MonotoneTable::dyadic(|t| (-c1 * loglog_profile(t)).exp(), 40)?;
    let v = MonotoneTable::dyadic(|t| w.eval(t) * (-c1 * loglog_profile(t)).exp(), 40)?;
    let rep = cyclicity_diagnostic(
        &cand.series,
        &u,
        &v,
        &w,
        &c.r_list,
        &cand.grid,
        c.quotient_degree,
    )?;
    let mut out = Outcome::default();
    out.table = Table::new(&["stage", "r", "quotient_norm"]);
    for (i, (r, norm)) in rep.sweep.iter().enumerate() {
        out.table.push(vec![i.into(), (*r).into(), (*norm).into()]);
    }
    out.summary_value("c1", rep.c1);
    out.summary_value("c2", rep.c2);
    out.summary_value("lower_ratio", cand.lower_ratio);
    out.summary_value("upper_ratio", cand.upper_ratio);
    out.summary_value("dini_slope", cand.dini_slope);
    out.summary_value("mass", cand.arcs.mass);
    out.summary_value("max_arc_ratio1", cand.arcs.max_ratio1);
    out.summary_value("max_arc_ratio2", cand.arcs.max_ratio2);
    out.summary_value("profile", &rep.profile);
    out.summary_value("frequencies", &cand.spec.frequencies);
    out.summary_value("amplitudes", &cand.spec.amplitudes);
    out.parameter("grid_m", cand.spec.grid_m);
    out.parameter("disk_grid_radii", cand.grid.radii().len());
    out.parameter("disk_grid_angles", cand.grid.n_angles());
    out.parameter("quotient_degree", rep.quotient_degree);
    out.parameter("series_degree", cand.series.degree());
    Ok(out)
}

fn run_model(c: &ModelConfig) -> crate::Result<Outcome> {
    let theta = FiniteBlaschke::new(c.zeros.clone())?;
    let trunc = c.trunc_n.unwrap_or_else(|| (4 * theta.degree()).max(32));
    let gap = dualcyc_gap(&theta, &c.phi, trunc)?;
    let basis = model_space_basis(&theta, trunc)?;
    let mut out = Outcome::default();
    out.table = Table::new(&[
        "stage",
        "dist",
        "min_norm",
        "product",
        "l1w_norm",
        "pairing",
        "deviation",
    ]);
    let none = Cell::Text(String::new());
    out.table.push(vec![
        0usize.into(),
        gap.dist.into(),
        gap.min_norm.into(),
        gap.product.into(),
        none.clone(),
        none.clone(),
        none.clone(),
    ]);
    out.summary_value("dist", gap.dist);
    out.summary_value("min_norm", gap.min_norm);
    out.summary_value("product", gap.product);
    out.summary_value("restarts", gap.restarts);
    out.summary_value("converged", gap.dist_converged && gap.min_converged);
    out.summary_value("orthogonality_residual", basis.orthogonality_residual);
    out.summary_value("gram_residual", basis.gram_residual);
    out.summary_value("boundary_modulus_error", theta.boundary_modulus_error(4096));
    out.parameter("trunc_n", trunc);
    out.parameter("seed", gap.seed);
    out.parameter("restarts", gap.restarts);
    out.parameter("cd_tolerance", crate::modelspace::CD_TOL);

    if let Some(d) = &c.dbr {
        let sa = d.sa.clone().unwrap_or_else(|| feasible_sa_run(d.stages));
        let w = sa.weights()?;
        let witness = sa_pipeline(&w, &sa.sa_config())?;
        let fs: Vec<TaylorSeries> = witness
            .lifts
            .iter()
            .take(d.stages)
            .map(|l| l.series.clone())
            .collect();
        let rep = dbr_pairing_demo(&witness.k, &fs, &w, d.grid_m, d.trunc)?;
        for s in &rep.stages {
            out.table.push(vec![
                s.n.into(),
                none.clone(),
                none.clone(),
                none.clone(),
                s.l1w_norm.into(),
                s.pairing.into(),
                s.deviation.into(),
            ]);
        }
        out.summary_value("dbr_modulus_defect", rep.modulus_defect);
        out.summary_value("dbr_b0", rep.b0);
        out.summary_value("dbr_b0_expected", rep.b0_expected);
        out.summary_value("dbr_toeplitz_residual", rep.toeplitz_residual);
        out.summary_value("dbr_g_norm", rep.g_norm);
        out.summary_value("dbr_mu_mass", rep.mu_mass);
        out.parameter("grid_m", rep.grid_m);
        out.parameter("b_degree", rep.b_degree);
        out.parameter("dbr_trunc", rep.trunc);
        out.parameter("collar_cells", rep.collar_cells);
        out.parameter("sa", &sa);
        out.notes.push(format!(
            "finite truncation at degree {}; no extremality claim is made for b",
            rep.b_degree
        ));
    }
    Ok(out)
}
