//! Command-line front end: `run <config.json> --out <dir>` and
//! `report <dir>... --out merged.csv`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::experiments::{self, report, Overrides, RunError, SUP_NOTE, THREADS_ENV};

#[derive(Parser)]
#[command(
    name = "cauchy-coeffs",
    version,
    about = "Run coefficient-space experiments from JSON configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment; writes results.csv, summary.json and manifest.json.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the boundary grid size.
        #[arg(long)]
        grid_m: Option<usize>,
        /// Override the polynomial degree cap.
        #[arg(long)]
        degree_cap: Option<usize>,
    },
    /// Merge result tables of several runs into one long-format CSV.
    Report {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Sizes the global rayon pool from the thread-count variable, once.
pub fn init_threads() {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return;
    };
    match v.parse::<usize>() {
        Ok(n) if n > 0 => {
            // Fails only if a pool already exists, which cannot happen here.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        _ => eprintln!("ignoring {THREADS_ENV}={v}: expected a positive integer"),
    }
}

/// Parses `args` (program name first) and runs; returns the process exit
/// code: 0 success, 2 usage/schema/I/O errors, 3 numeric failures.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    init_threads();
    match cli.command {
        Command::Run {
            config,
            out,
            grid_m,
            degree_cap,
        } => match experiments::run_to_dir(&config, &out, Overrides { grid_m, degree_cap }) {
            Ok(outcome) => {
                for note in &outcome.notes {
                    if note == SUP_NOTE {
                        eprintln!("note: {note}");
                    }
                }
                println!("wrote {}", out.display());
                0
            }
            Err(e) => fail(e),
        },
        Command::Report { dirs, out } => {
            let rows = match report::merge_runs(&dirs) {
                Ok(r) => r,
                Err(e) => return fail(RunError::Io(e.to_string())),
            };
            let written = report::long_csv(&rows).and_then(|bytes| {
                let parent = match out.parent() {
                    Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                    _ => PathBuf::from("."),
                };
                let name = out
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                experiments::output::write_atomic(&parent, &name, &bytes)
            });
            match written {
                Ok(()) => {
                    println!("wrote {} rows to {}", rows.len(), out.display());
                    0
                }
                Err(e) => fail(RunError::Io(format!("{}: {e}", out.display()))),
            }
        }
    }
}

fn fail(e: RunError) -> u8 {
    eprintln!("error: {e}");
    e.exit_code() as u8
}

#[cfg(test)]
mod tests {
    use std::fs;
    use std::path::Path;

    use super::main_with_args;

    fn run(args: &[&str]) -> u8 {
        main_with_args(std::iter::once("cauchy-coeffs").chain(args.iter().copied()))
    }

    fn write(dir: &Path, name: &str, text: &str) -> String {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    const CLARK: &str = r#"{
  "kind": "clark-check",
  "name": "clark",
  "mu": {"atoms": [
    {"theta": 0.1, "weight": [0.5, 0.0]},
    {"theta": 0.4, "weight": [0.3, 0.0]},
    {"theta": 0.75, "weight": [0.2, 0.0]}
  ]}
}"#;

    const SA_FAST: &str = r#"{
  "kind": "sa-run",
  "name": "sa",
  "weights": {"rule": "geometric", "ratio": 0.5, "n_max": 1000},
  "delta": 0.9,
  "gamma_seq": [0.55, 0.3025, 0.166375],
  "delta_seq": [0.18, 0.18, 0.18]
}"#;

    #[test]
    fn clark_check_writes_artifacts() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = write(tmp.path(), "c.json", CLARK);
        let out = tmp.path().join("out");
        assert_eq!(run(&["run", &cfg, "--out", out.to_str().unwrap()]), 0);
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert!(summary["max_residual"].as_f64().unwrap() <= 1e-9);
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["kind"], "clark-check");
        assert_eq!(manifest["config"]["degree"], 256);
        assert_eq!(manifest["parameters"]["radius"], 0.9);
        assert!(out.join("results.csv").is_file());
        // No temporaries left behind by the atomic writes.
        assert!(fs::read_dir(&out).unwrap().all(|e| !e
            .unwrap()
            .file_name()
            .to_string_lossy()
            .starts_with('.')));
    }

    #[test]
    fn schema_errors_exit_2() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("o");
        let o = out.to_str().unwrap();
        for text in [
            "",
            "{}",
            "{\"kind\": \"nope\"}",
            "{\"kind\": \"sa-run\", \"deltas\": [0.1]}",
            "[1, 2",
        ] {
            let cfg = write(tmp.path(), "bad.json", text);
            assert_eq!(run(&["run", &cfg, "--out", o]), 2, "{text:?}");
        }
        assert_eq!(run(&["run", "/nonexistent/config.json", "--out", o]), 2);
        assert_eq!(run(&["frobnicate"]), 2);
        assert!(!out.exists());
    }

    #[test]
    fn schema_errors_carry_line_and_column() {
        let text = "{\"kind\": \"clark-check\",\n \"mu\": {\"atoms\": []},\n \"radius\": \"far\"}";
        let err = crate::experiments::parse_config(text)
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn numeric_failures_exit_3() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("o");
        // The reference weights need m_1 beyond 2^60.
        let cfg = write(tmp.path(), "sa.json", r#"{"kind": "sa-run"}"#);
        assert_eq!(run(&["run", &cfg, "--out", out.to_str().unwrap()]), 3);
        let cfg = write(
            tmp.path(),
            "m.json",
            r#"{"kind": "model-check", "zeros": [[1.5, 0.0]]}"#,
        );
        assert_eq!(run(&["run", &cfg, "--out", out.to_str().unwrap()]), 3);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = write(tmp.path(), "sa.json", SA_FAST);
        let a = tmp.path().join("a");
        let b = tmp.path().join("b");
        assert_eq!(run(&["run", &cfg, "--out", a.to_str().unwrap()]), 0);
        assert_eq!(run(&["run", &cfg, "--out", b.to_str().unwrap()]), 0);
        for f in ["results.csv", "summary.json", "manifest.json", "k.json"] {
            assert_eq!(
                fs::read(a.join(f)).unwrap(),
                fs::read(b.join(f)).unwrap(),
                "{f}"
            );
        }
        let csv = fs::read_to_string(a.join("results.csv")).unwrap();
        let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
        for col in ["m_n", "N_n", "l1w_norm", "supK_dev", "K_measure"] {
            assert!(header.contains(&col), "{col}");
        }
    }

    #[test]
    fn report_merges_and_tags_grid() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = write(tmp.path(), "sa.json", SA_FAST);
        let a = tmp.path().join("a");
        let b = tmp.path().join("b");
        assert_eq!(run(&["run", &cfg, "--out", a.to_str().unwrap()]), 0);
        assert_eq!(
            run(&[
                "run",
                &cfg,
                "--out",
                b.to_str().unwrap(),
                "--grid-m",
                "8192"
            ]),
            0
        );
        let merged = tmp.path().join("merged.csv");
        let m = merged.to_str().unwrap();
        assert_eq!(
            run(&[
                "report",
                a.to_str().unwrap(),
                b.to_str().unwrap(),
                "--out",
                m
            ]),
            0
        );
        let text = fs::read_to_string(&merged).unwrap();
        let rows: Vec<&str> = text
            .lines()
            .skip(1)
            .filter(|l| l.contains(",K_measure,"))
            .collect();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows.iter().filter(|r| r.ends_with(",16384")).count(), 3);
        assert_eq!(rows.iter().filter(|r| r.ends_with(",8192")).count(), 3);

        // A single run passes through: one row per (stage, metric).
        assert_eq!(run(&["report", a.to_str().unwrap(), "--out", m]), 0);
        let single = fs::read_to_string(&merged).unwrap();
        let csv = fs::read_to_string(a.join("results.csv")).unwrap();
        let cells = csv.lines().next().unwrap().split(',').count() - 1;
        assert_eq!(single.lines().count() - 1, 3 * cells);

        assert_eq!(
            run(&[
                "report",
                tmp.path().join("missing").to_str().unwrap(),
                "--out",
                m
            ]),
            2
        );
    }

    #[test]
    fn every_kind_dispatches() {
        let configs = [
            r#"{"kind": "conjugate", "phi": {"family": "power", "params": [2.0]}, "points": 8, "brute_force_points": 1000}"#,
            r#"{"kind": "orlicz-norm", "phi": {"family": "power", "params": [3.0]}, "random": {"count": 3, "max_len": 8}}"#,
            r#"{"kind": "majorant", "psi": {"family": "power", "params": [4.0]}, "n_blocks": 10}"#,
            r#"{"kind": "riesz-diag", "spec": {"frequencies": [4, 16], "amplitudes": [0.5, 0.5], "grid_m": 1024}}"#,
            r#"{"kind": "bloch-check", "w": {"rule": "constant", "value": 1.0}, "polynomials": [[[0,0],[1,0]]], "grid": {"j_max": 6, "per_octave": 1, "n_angles": 32}}"#,
            r#"{"kind": "cyclic-run", "w": {"rule": "constant", "value": 1.0}, "depth": 2, "r_list": [0.9], "quotient_degree": 64}"#,
            r#"{"kind": "model-check", "zeros": [[0.0, 0.0]]}"#,
        ];
        for text in configs {
            let (exp, out) = crate::experiments::run_config_str(text, Default::default())
                .unwrap_or_else(|e| panic!("{text}: {e}"));
            assert!(!out.table.rows.is_empty(), "{}", exp.kind());
            assert!(!out.summary.is_empty(), "{}", exp.kind());
        }
    }
}
