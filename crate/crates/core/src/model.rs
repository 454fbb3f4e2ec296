//! Regression problem instances: the dataset, the generating truth, the
//! synthetic design generator and CSV ingestion.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{BcsError, Result};
use crate::io_util::{self, fmt_f64};
use crate::rng::{self, STREAM_DATA};

/// Response vector and design matrix of one regression problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub response_name: String,
    pub column_names: Vec<String>,
}

impl Dataset {
    pub fn new(y: DVector<f64>, x: DMatrix<f64>) -> Result<Self> {
        let names = (0..x.ncols()).map(|j| format!("x{j}")).collect();
        Self::with_names(y, x, "y".to_string(), names)
    }

    pub fn with_names(
        y: DVector<f64>,
        x: DMatrix<f64>,
        response_name: String,
        column_names: Vec<String>,
    ) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(BcsError::Dimension(format!(
                "design has {} rows but response has length {}",
                x.nrows(),
                y.len()
            )));
        }
        if column_names.len() != x.ncols() {
            return Err(BcsError::Dimension(format!(
                "{} column names for {} columns",
                column_names.len(),
                x.ncols()
            )));
        }
        if y.is_empty() || x.ncols() == 0 {
            return Err(BcsError::Dimension("empty dataset".into()));
        }
        if !y.iter().all(|v| v.is_finite()) {
            return Err(BcsError::NonFinite("response".into()));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(BcsError::NonFinite("design matrix".into()));
        }
        Ok(Self {
            y,
            x,
            response_name,
            column_names,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Centers and scales every non-constant column to unit sample variance.
    /// Constant columns (an intercept) are left untouched.
    pub fn standardize_columns(&mut self) {
        let n = self.n() as f64;
        if self.n() < 2 {
            return;
        }
        for mut col in self.x.column_iter_mut() {
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            if var > 0.0 {
                let sd = var.sqrt();
                col.apply(|v| *v = (*v - mean) / sd);
            }
        }
    }

    /// Sample variance of the response (denominator `n - 1`).
    pub fn response_variance(&self) -> f64 {
        let n = self.n() as f64;
        let mean = self.y.sum() / n;
        self.y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    }
}

/// Ground truth behind a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueModel {
    pub beta_star: Vec<f64>,
    pub sigma_star: f64,
}

impl TrueModel {
    pub fn new(beta_star: Vec<f64>, sigma_star: f64) -> Result<Self> {
        if !(sigma_star >= 0.0 && sigma_star.is_finite()) {
            return Err(BcsError::InvalidParameter(format!(
                "sigma_star must be finite and nonnegative, got {sigma_star}"
            )));
        }
        if !beta_star.iter().all(|b| b.is_finite()) {
            return Err(BcsError::NonFinite("beta_star".into()));
        }
        Ok(Self {
            beta_star,
            sigma_star,
        })
    }

    /// Sorted support `{ j : beta_star[j] != 0 }`.
    pub fn support(&self) -> Vec<usize> {
        self.beta_star
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn sparsity(&self) -> usize {
        self.support().len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CovStructure {
    Independent,
    EquiCorrelated { rho: f64 },
}

impl CovStructure {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CovStructure::Independent => Ok(()),
            CovStructure::EquiCorrelated { rho } if (0.0..1.0).contains(&rho) => Ok(()),
            CovStructure::EquiCorrelated { rho } => Err(BcsError::InvalidParameter(format!(
                "equicorrelation rho must lie in [0, 1), got {rho}"
            ))),
        }
    }
}

/// Shape of a synthetic design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub n: usize,
    pub p: usize,
    pub cov: CovStructure,
    /// Column 0 is the constant 1 vector, penalized like every other coordinate.
    pub intercept: bool,
}

/// Draws `X` with rows from `N(0, Sigma)` and `y = X beta* + sigma* eps`.
///
/// Equicorrelated rows use the one-factor construction
/// `x_j = sqrt(rho) z_0 + sqrt(1 - rho) z_j`, which costs `O(np)`.
pub fn generate_dataset(design: &DesignSpec, truth: &TrueModel, seed: u64) -> Result<Dataset> {
    let DesignSpec {
        n,
        p,
        cov,
        intercept,
    } = *design;
    if n < 2 || p < 1 {
        return Err(BcsError::Dimension(format!(
            "need n >= 2 and p >= 1, got n={n}, p={p}"
        )));
    }
    if truth.beta_star.len() != p {
        return Err(BcsError::Dimension(format!(
            "beta_star has length {} but p = {p}",
            truth.beta_star.len()
        )));
    }
    cov.validate()?;

    let mut rng = rng::stream(seed, STREAM_DATA);
    let first = usize::from(intercept);
    let (shared, own) = match cov {
        CovStructure::Independent => (0.0, 1.0),
        CovStructure::EquiCorrelated { rho } => (rho.sqrt(), (1.0 - rho).sqrt()),
    };

    let mut x = DMatrix::<f64>::zeros(n, p);
    for i in 0..n {
        if intercept {
            x[(i, 0)] = 1.0;
        }
        let z0: f64 = if shared > 0.0 {
            rng.sample(StandardNormal)
        } else {
            0.0
        };
        for j in first..p {
            let zj: f64 = rng.sample(StandardNormal);
            x[(i, j)] = shared * z0 + own * zj;
        }
    }

    let beta = DVector::from_column_slice(&truth.beta_star);
    let mut y = &x * beta;
    for yi in y.iter_mut() {
        let eps: f64 = rng.sample(StandardNormal);
        *yi += truth.sigma_star * eps;
    }
    Dataset::new(y, x)
}

/// Sidecar written next to generated data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub version: String,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub cov: CovStructure,
    pub intercept: bool,
    pub truth: TrueModel,
}

impl DatasetMeta {
    pub fn new(design: &DesignSpec, truth: &TrueModel, seed: u64) -> Self {
        Self {
            version: io_util::VERSION.to_string(),
            n: design.n,
            p: design.p,
            seed,
            cov: design.cov,
            intercept: design.intercept,
            truth: truth.clone(),
        }
    }
}

/// Reads a headed numeric CSV; `response_column` becomes `y`, every other
/// column becomes a design column in header order.
pub fn load_csv(path: &Path, response_column: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| BcsError::csv(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| BcsError::csv(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let response_idx = header
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| BcsError::MissingColumn(response_column.to_string()))?;

    let mut y = Vec::new();
    let mut cols: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| BcsError::csv(path, e))?;
        let row = i + 1;
        if record.len() != header.len() {
            return Err(BcsError::RaggedRow {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        for (k, cell) in record.iter().enumerate() {
            let value: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| BcsError::NonNumeric {
                    row,
                    column: header[k].clone(),
                    value: cell.to_string(),
                })?;
            if k == response_idx {
                y.push(value);
            } else {
                cols.push(value);
            }
        }
        rows += 1;
    }
    let p = header.len() - 1;
    let x = DMatrix::from_row_slice(rows, p, &cols);
    let names = header
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != response_idx)
        .map(|(_, h)| h.clone())
        .collect();
    let data = Dataset::with_names(DVector::from_vec(y), x, response_column.to_string(), names)?;
    log::info!("loaded {}: n={}, p={}", path.display(), data.n(), data.p());
    Ok(data)
}

/// Writes the response followed by the design columns.
pub fn write_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| BcsError::csv(path, e))?;
    let mut header = vec![data.response_name.clone()];
    header.extend(data.column_names.iter().cloned());
    writer
        .write_record(&header)
        .map_err(|e| BcsError::csv(path, e))?;
    let mut row = Vec::with_capacity(data.p() + 1);
    for i in 0..data.n() {
        row.clear();
        row.push(fmt_f64(data.y[i]));
        row.extend((0..data.p()).map(|j| fmt_f64(data.x[(i, j)])));
        writer
            .write_record(&row)
            .map_err(|e| BcsError::csv(path, e))?;
    }
    writer.flush().map_err(|e| BcsError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn sparse_truth(p: usize) -> TrueModel {
        let mut beta = vec![0.0; p];
        beta[1] = 1.0;
        beta[2] = 1.5;
        beta[3] = 2.0;
        TrueModel::new(beta, 1.0).unwrap()
    }

    #[test]
    fn first_scenario_instance_shape() {
        let design = DesignSpec {
            n: 80,
            p: 201,
            cov: CovStructure::Independent,
            intercept: true,
        };
        let truth = sparse_truth(201);
        let data = generate_dataset(&design, &truth, 11).unwrap();
        assert_eq!((data.n(), data.p()), (80, 201));
        assert!(data.x.column(0).iter().all(|v| *v == 1.0));
        assert_eq!(truth.support(), vec![1, 2, 3]);
        assert_eq!(truth.sparsity(), 3);
    }

    #[test]
    fn noise_free_null_model_gives_zero_response() {
        let design = DesignSpec {
            n: 10,
            p: 4,
            cov: CovStructure::EquiCorrelated { rho: 0.3 },
            intercept: false,
        };
        let truth = TrueModel::new(vec![0.0; 4], 0.0).unwrap();
        let data = generate_dataset(&design, &truth, 3).unwrap();
        assert!(data.y.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn generation_is_deterministic() {
        let design = DesignSpec {
            n: 20,
            p: 7,
            cov: CovStructure::EquiCorrelated { rho: 0.5 },
            intercept: true,
        };
        let truth = sparse_truth(7);
        let a = generate_dataset(&design, &truth, 99).unwrap();
        let b = generate_dataset(&design, &truth, 99).unwrap();
        let c = generate_dataset(&design, &truth, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn equicorrelation_matches_rho() {
        let n = 100_000;
        let design = DesignSpec {
            n,
            p: 3,
            cov: CovStructure::EquiCorrelated { rho: 0.5 },
            intercept: true,
        };
        let truth = TrueModel::new(vec![0.0; 3], 1.0).unwrap();
        let data = generate_dataset(&design, &truth, 5).unwrap();
        let (a, b) = (data.x.column(1), data.x.column(2));
        let nf = n as f64;
        let (ma, mb) = (a.sum() / nf, b.sum() / nf);
        let cov = a
            .iter()
            .zip(b.iter())
            .map(|(u, v)| (u - ma) * (v - mb))
            .sum::<f64>()
            / nf;
        let va = a.iter().map(|u| (u - ma).powi(2)).sum::<f64>() / nf;
        let vb = b.iter().map(|v| (v - mb).powi(2)).sum::<f64>() / nf;
        let corr = cov / (va * vb).sqrt();
        // SE of a sample correlation near 0.5 is (1 - rho^2)/sqrt(n) ~ 0.0024.
        assert!((corr - 0.5).abs() < 3.0 * 0.75 / nf.sqrt(), "corr = {corr}");
        assert!((corr - 0.5).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_inputs() {
        let design = DesignSpec {
            n: 10,
            p: 3,
            cov: CovStructure::Independent,
            intercept: false,
        };
        let truth = TrueModel::new(vec![0.0; 4], 1.0).unwrap();
        assert!(matches!(
            generate_dataset(&design, &truth, 0),
            Err(BcsError::Dimension(_))
        ));
        let truth = TrueModel::new(vec![0.0; 3], 1.0).unwrap();
        let bad = DesignSpec {
            cov: CovStructure::EquiCorrelated { rho: 1.0 },
            ..design
        };
        assert!(matches!(
            generate_dataset(&bad, &truth, 0),
            Err(BcsError::InvalidParameter(_))
        ));
        assert!(TrueModel::new(vec![1.0], -1.0).is_err());
    }

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_small_csv() {
        let f = write_tmp("y,x1,x2\n1,2,3\n4,5,6\n7,8,9\n");
        let data = load_csv(f.path(), "y").unwrap();
        assert_eq!((data.n(), data.p()), (3, 2));
        assert_eq!(data.column_names, vec!["x1", "x2"]);
        assert_eq!(data.x[(1, 1)], 6.0);
        assert_eq!(data.y[2], 7.0);

        let data = load_csv(f.path(), "x1").unwrap();
        assert_eq!(data.column_names, vec!["y", "x2"]);
        assert_eq!(data.y[0], 2.0);
    }

    #[test]
    fn load_csv_error_paths() {
        let f = write_tmp("a,b\n1,2\n");
        let err = load_csv(f.path(), "y").unwrap_err();
        assert!(matches!(err, BcsError::MissingColumn(ref c) if c == "y"));
        assert!(err.to_string().contains("`y`"));

        let f = write_tmp("y,x\n1,2\n3,oops\n");
        match load_csv(f.path(), "y").unwrap_err() {
            BcsError::NonNumeric { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "x");
            }
            e => panic!("unexpected {e}"),
        }

        let f = write_tmp("y,x\n1,2\n3\n");
        assert!(matches!(
            load_csv(f.path(), "y").unwrap_err(),
            BcsError::RaggedRow { row: 2, .. }
        ));

        let f = write_tmp("y,x\n1,NaN\n");
        assert!(matches!(
            load_csv(f.path(), "y").unwrap_err(),
            BcsError::NonNumeric { .. }
        ));
    }

    #[test]
    fn single_row_is_accepted_by_loader() {
        let f = write_tmp("y,x\n1,2\n");
        let data = load_csv(f.path(), "y").unwrap();
        assert_eq!(data.n(), 1);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let design = DesignSpec {
            n: 15,
            p: 6,
            cov: CovStructure::EquiCorrelated { rho: 0.2 },
            intercept: true,
        };
        let truth = sparse_truth(6);
        let data = generate_dataset(&design, &truth, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        write_csv(&data, &path).unwrap();
        let back = load_csv(&path, "y").unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn standardize_keeps_intercept() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 4.0, 1.0, 9.0]);
        let mut data = Dataset::new(DVector::from_vec(vec![1.0, 2.0, 3.0]), x).unwrap();
        data.standardize_columns();
        assert!(data.x.column(0).iter().all(|v| *v == 1.0));
        let c = data.x.column(1);
        assert!(c.sum().abs() < 1e-12);
        let var = c.iter().map(|v| v * v).sum::<f64>() / 2.0;
        assert!((var - 1.0).abs() < 1e-12);
    }
}
