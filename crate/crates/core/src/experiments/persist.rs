use std::path::{Path, PathBuf};

use crate::error::{BcsError, Result};
use crate::experiments::scenario::{
    aggregate, Aggregate, ReplicateRow, ScenarioResult, ScenarioSpec,
};
use crate::inference::Metrics;
use crate::io_util::{ensure_dir, fmt_f64, read_json, write_json};
use crate::manifest::{verify_manifest, write_manifest, Manifest};

pub const SCENARIO_JSON: &str = "scenario.json";
pub const REPLICATES_CSV: &str = "replicates.csv";
pub const AGGREGATE_JSON: &str = "aggregate.json";
pub const CHAINS_DIR: &str = "chains";

const METHODS: [&str; 2] = ["bcs", "lasso"];

fn header() -> Vec<String> {
    let mut h: Vec<String> = ["replicate", "data_seed", "sampler_seed", "gamma_hat"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for method in METHODS {
        h.extend(Metrics::NAMES.iter().map(|m| format!("{method}_{m}")));
    }
    h.push("error".into());
    h
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn write_rows(path: &Path, rows: &[ReplicateRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| BcsError::csv(path, e))?;
    w.write_record(header())
        .map_err(|e| BcsError::csv(path, e))?;
    for r in rows {
        let mut rec = vec![
            r.replicate.to_string(),
            r.data_seed.to_string(),
            r.sampler_seed.to_string(),
            opt(r.gamma_hat),
        ];
        for m in [&r.bcs, &r.lasso] {
            match m {
                Some(m) => rec.extend(m.values().iter().map(|v| opt(*v))),
                None => rec.extend(std::iter::repeat_n(String::new(), Metrics::NAMES.len())),
            }
        }
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(&rec).map_err(|e| BcsError::csv(path, e))?;
    }
    w.flush().map_err(|e| BcsError::io(path, e))
}

fn read_rows(path: &Path) -> Result<Vec<ReplicateRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| BcsError::csv(path, e))?;
    let expected = header();
    let found: Vec<String> = reader
        .headers()
        .map_err(|e| BcsError::csv(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if found != expected {
        return Err(BcsError::Inconsistent(format!(
            "unexpected header in {}",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| BcsError::csv(path, e))?;
        let row = i + 1;
        let cell = |k: usize| -> Result<Option<f64>> {
            let s = &rec[k];
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| BcsError::NonNumeric {
                row,
                column: expected[k].clone(),
                value: s.to_string(),
            })
        };
        let int = |k: usize| -> Result<u64> {
            rec[k].parse().map_err(|_| BcsError::NonNumeric {
                row,
                column: expected[k].clone(),
                value: rec[k].to_string(),
            })
        };
        let metrics = |offset: usize| -> Result<Option<Metrics>> {
            let v = (0..Metrics::NAMES.len())
                .map(|k| cell(offset + k))
                .collect::<Result<Vec<_>>>()?;
            if v.iter().all(Option::is_none) {
                return Ok(None);
            }
            let need = |x: Option<f64>| {
                x.ok_or_else(|| {
                    BcsError::Inconsistent(format!("row {row} has a partial metric record"))
                })
            };
            Ok(Some(Metrics {
                l1_true: need(v[0])?,
                l1_false: need(v[1])?,
                n_true_selected: need(v[2])? as usize,
                n_false_selected: need(v[3])? as usize,
                coverage_true: v[4],
                coverage_false: v[5],
                length_true: v[6],
                length_false: v[7],
            }))
        };
        let m = Metrics::NAMES.len();
        let error = rec[4 + 2 * m].to_string();
        rows.push(ReplicateRow {
            replicate: int(0)? as usize,
            data_seed: int(1)?,
            sampler_seed: int(2)?,
            gamma_hat: cell(3)?,
            bcs: metrics(4)?,
            lasso: metrics(4 + m)?,
            error: (!error.is_empty()).then_some(error),
        });
    }
    Ok(rows)
}

fn files_under(root: &Path, rel: &Path, out: &mut Vec<String>) -> Result<()> {
    let dir = root.join(rel);
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| BcsError::io(&dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| BcsError::io(&dir, err)))
        .collect::<Result<_>>()?;
    entries.sort();
    for path in entries {
        let name = rel.join(path.file_name().expect("directory entry has a name"));
        if path.is_dir() {
            files_under(root, &name, out)?;
        } else {
            out.push(name.to_string_lossy().replace('\\', "/"));
        }
    }
    Ok(())
}

/// Every regular file below `dir/sub`, relative to `dir`, sorted.
pub fn list_files(dir: &Path, sub: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    if dir.join(sub).is_dir() {
        files_under(dir, Path::new(sub), &mut out)?;
    }
    Ok(out)
}

/// Writes `scenario.json`, `replicates.csv`, `aggregate.json` and a
/// manifest covering them and any chain dumps already under `chains/`.
pub fn persist(result: &ScenarioResult, dir: &Path, config: serde_json::Value) -> Result<Manifest> {
    ensure_dir(dir)?;
    write_json(&dir.join(SCENARIO_JSON), &result.spec)?;
    write_rows(&dir.join(REPLICATES_CSV), &result.rows)?;
    write_json(&dir.join(AGGREGATE_JSON), &result.aggregate)?;
    let mut files = vec![
        SCENARIO_JSON.to_string(),
        REPLICATES_CSV.to_string(),
        AGGREGATE_JSON.to_string(),
    ];
    files.extend(list_files(dir, CHAINS_DIR)?);
    write_manifest(dir, &files, config)
}

/// Reads a persisted result, checking file hashes and that the stored
/// aggregate equals a fresh aggregation of the stored rows.
pub fn load(dir: &Path) -> Result<ScenarioResult> {
    verify_manifest(dir)?;
    let spec: ScenarioSpec = read_json(&dir.join(SCENARIO_JSON))?;
    let rows = read_rows(&dir.join(REPLICATES_CSV))?;
    let stored: Aggregate = read_json(&dir.join(AGGREGATE_JSON))?;
    let fresh = aggregate(&rows);
    if fresh != stored {
        return Err(BcsError::Inconsistent(
            "aggregate.json does not match the per-replicate rows".into(),
        ));
    }
    Ok(ScenarioResult {
        spec,
        rows,
        aggregate: stored,
    })
}
