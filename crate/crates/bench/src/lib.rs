//! Shared fixtures for the criterion benches.

use bcs_core::model::generate_dataset;
use bcs_core::{CovStructure, Dataset, DesignSpec, TrueModel};

/// Independent Gaussian design with four unit coefficients.
pub fn sparse_problem(n: usize, p: usize, seed: u64) -> Dataset {
    let mut beta = vec![0.0; p];
    beta[..4.min(p)].fill(1.0);
    let design = DesignSpec {
        n,
        p,
        cov: CovStructure::Independent,
        intercept: false,
    };
    let truth = TrueModel::new(beta, 1.0).expect("valid truth");
    generate_dataset(&design, &truth, seed).expect("valid design")
}
