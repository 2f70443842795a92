//! Merging result tables of several runs into one long-format CSV.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("missing input: {0}")]
    Missing(String),
    #[error("malformed input {path}: {reason}")]
    Malformed { path: String, reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LongRow {
    pub experiment: String,
    pub stage: String,
    pub metric: String,
    pub value: String,
    pub grid_m: String,
}

fn read_run(dir: &Path) -> Result<(String, String, csv::Reader<fs::File>), ReportError> {
    let manifest_path = dir.join("manifest.json");
    let results_path = dir.join("results.csv");
    for p in [&manifest_path, &results_path] {
        if !p.is_file() {
            return Err(ReportError::Missing(p.display().to_string()));
        }
    }
    let malformed = |p: &PathBuf, reason: String| ReportError::Malformed {
        path: p.display().to_string(),
        reason,
    };
    let text =
        fs::read_to_string(&manifest_path).map_err(|e| malformed(&manifest_path, e.to_string()))?;
    let manifest: Value =
        serde_json::from_str(&text).map_err(|e| malformed(&manifest_path, e.to_string()))?;
    let fallback = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    let name = manifest
        .get("name")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .unwrap_or(fallback);
    let grid_m = match manifest.pointer("/parameters/grid_m") {
        Some(Value::Number(n)) => n.to_string(),
        _ => String::new(),
    };
    let reader = csv::Reader::from_path(&results_path)
        .map_err(|e| malformed(&results_path, e.to_string()))?;
    Ok((name, grid_m, reader))
}

/// Wide tables to `(experiment, stage, metric, value, grid_m)` rows; the
/// `grid_m` tag keeps runs on different grids apart. Experiment names are
/// made unique by suffixing `#2`, `#3`, … in input order.
pub fn merge_runs(dirs: &[PathBuf]) -> Result<Vec<LongRow>, ReportError> {
    if dirs.is_empty() {
        return Err(ReportError::Missing("no run directories given".into()));
    }
    let mut out = Vec::new();
    let mut seen: Vec<String> = Vec::new();
    for dir in dirs {
        let (mut name, grid_m, mut reader) = read_run(dir)?;
        let count = seen.iter().filter(|s| **s == name).count();
        seen.push(name.clone());
        if count > 0 {
            name = format!("{name}#{}", count + 1);
        }
        let malformed = |reason: String| ReportError::Malformed {
            path: dir.display().to_string(),
            reason,
        };
        let header = reader
            .headers()
            .map_err(|e| malformed(e.to_string()))?
            .clone();
        for record in reader.records() {
            let record = record.map_err(|e| malformed(e.to_string()))?;
            let stage = record.get(0).unwrap_or_default().to_owned();
            for (metric, value) in header.iter().zip(record.iter()).skip(1) {
                out.push(LongRow {
                    experiment: name.clone(),
                    stage: stage.clone(),
                    metric: metric.to_owned(),
                    value: value.to_owned(),
                    grid_m: grid_m.clone(),
                });
            }
        }
    }
    Ok(out)
}

pub fn long_csv(rows: &[LongRow]) -> std::io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["experiment", "stage", "metric", "value", "grid_m"])?;
    for r in rows {
        w.write_record([&r.experiment, &r.stage, &r.metric, &r.value, &r.grid_m])?;
    }
    w.into_inner().map_err(|e| e.into_error())
}
