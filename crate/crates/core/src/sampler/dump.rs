//! Chain dumps: `chain.csv` with one row per kept draw and a
//! `chain.meta.json` sidecar describing how the chain was produced.

use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{BcsError, Result};
use crate::io_util::{self, fmt_f64, VERSION};
use crate::sampler::chain::{DrawsMeta, PosteriorDraws};
use crate::sampler::state::{ChainState, Latent};

pub const CHAIN_CSV: &str = "chain.csv";
pub const CHAIN_META: &str = "chain.meta.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Sidecar {
    version: String,
    #[serde(flatten)]
    meta: DrawsMeta,
    latents: bool,
}

/// Writes `chain.csv` and `chain.meta.json` into `dir`.
pub fn write_draws(dir: &Path, draws: &PosteriorDraws, with_latents: bool) -> Result<()> {
    io_util::ensure_dir(dir)?;
    let path = dir.join(CHAIN_CSV);
    let p = draws.p();
    let latent_prefix = match draws.draws.first().map(|d| &d.latent) {
        Some(Latent::Scales(_)) if with_latents => Some("lambda2"),
        Some(Latent::Indicators(_)) if with_latents => Some("z"),
        _ => None,
    };

    let mut w = csv::Writer::from_path(&path).map_err(|e| BcsError::csv(&path, e))?;
    let mut header = vec!["iter".to_string(), "sigma2".to_string()];
    header.extend((0..p).map(|j| format!("beta_{j}")));
    if let Some(prefix) = latent_prefix {
        header.extend((0..p).map(|j| format!("{prefix}_{j}")));
    }
    w.write_record(&header)
        .map_err(|e| BcsError::csv(&path, e))?;

    let mut row = Vec::with_capacity(header.len());
    for (k, d) in draws.draws.iter().enumerate() {
        row.clear();
        row.push(draws.iteration(k).to_string());
        row.push(fmt_f64(d.sigma2));
        row.extend(d.beta.iter().map(|&b| fmt_f64(b)));
        match (&d.latent, latent_prefix) {
            (Latent::Scales(l2), Some(_)) => row.extend(l2.iter().map(|&v| fmt_f64(v))),
            (Latent::Indicators(z), Some(_)) => {
                row.extend(z.iter().map(|&b| if b { "1" } else { "0" }.to_string()))
            }
            _ => {}
        }
        w.write_record(&row).map_err(|e| BcsError::csv(&path, e))?;
    }
    w.flush().map_err(|e| BcsError::io(&path, e))?;

    let sidecar = Sidecar {
        version: VERSION.to_string(),
        meta: draws.meta.clone(),
        latents: latent_prefix.is_some(),
    };
    io_util::write_json(&dir.join(CHAIN_META), &sidecar)
}

/// Reads a dump written by [`write_draws`]. Latents come back as
/// [`Latent::Omitted`] unless they were dumped.
pub fn read_draws(dir: &Path) -> Result<PosteriorDraws> {
    let sidecar: Sidecar = io_util::read_json(&dir.join(CHAIN_META))?;
    let meta = sidecar.meta;
    let p = meta.p;
    let path = dir.join(CHAIN_CSV);
    let mut reader = csv::Reader::from_path(&path).map_err(|e| BcsError::csv(&path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| BcsError::csv(&path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    for (k, name) in ["iter", "sigma2"].into_iter().enumerate() {
        if header.get(k).map(String::as_str) != Some(name) {
            return Err(BcsError::MissingColumn(name.to_string()));
        }
    }
    if header.len() < 2 + p {
        return Err(BcsError::MissingColumn(format!(
            "beta_{}",
            header.len().saturating_sub(2)
        )));
    }
    let latent_kind = header.get(2 + p).map(|h| h.split('_').next().unwrap_or(""));
    let has_latents = match latent_kind {
        None => false,
        Some("lambda2") | Some("z") if header.len() == 2 + 2 * p => true,
        Some(other) => {
            return Err(BcsError::Inconsistent(format!(
                "unexpected chain column group `{other}`"
            )))
        }
    };
    let indicators = latent_kind == Some("z");

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| BcsError::csv(&path, e))?;
        let row = i + 1;
        if record.len() != header.len() {
            return Err(BcsError::RaggedRow {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        let num = |k: usize| -> Result<f64> {
            record[k].parse::<f64>().map_err(|_| BcsError::NonNumeric {
                row,
                column: header[k].clone(),
                value: record[k].to_string(),
            })
        };
        let sigma2 = num(1)?;
        let beta = (0..p).map(|j| num(2 + j)).collect::<Result<Vec<_>>>()?;
        let latent = if !has_latents {
            Latent::Omitted
        } else if indicators {
            Latent::Indicators(
                (0..p)
                    .map(|j| num(2 + p + j).map(|v| v != 0.0))
                    .collect::<Result<_>>()?,
            )
        } else {
            Latent::Scales((0..p).map(|j| num(2 + p + j)).collect::<Result<_>>()?)
        };
        out.push(ChainState {
            beta: DVector::from_vec(beta),
            sigma2,
            latent,
        });
    }
    if out.len() != meta.kept {
        return Err(BcsError::Inconsistent(format!(
            "{} rows in {} but the sidecar records {} draws",
            out.len(),
            path.display(),
            meta.kept
        )));
    }
    Ok(PosteriorDraws { draws: out, meta })
}
