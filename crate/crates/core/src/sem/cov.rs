//! Sample covariance matrices, checked positive definite at construction.

use nalgebra::{DMatrix, SymmetricEigen};

use super::Dataset;
use crate::error::{Error, Result};

/// A `p x p` symmetric positive-definite covariance matrix together with
/// the sample size that produced it. `ln |S|` is cached from the
/// Cholesky factor used for the definiteness check.
#[derive(Debug, Clone)]
pub struct CovMatrix {
    s: DMatrix<f64>,
    n_samples: usize,
    ln_det: f64,
}

impl CovMatrix {
    pub fn new(s: DMatrix<f64>, n_samples: usize) -> Result<Self> {
        if !s.is_square() || s.nrows() == 0 {
            return Err(Error::Structural("covariance matrix must be square".into()));
        }
        let asym = (&s - s.transpose()).abs().max();
        if asym > 1e-8 * s.abs().max().max(1.0) {
            return Err(Error::Structural(format!(
                "covariance matrix is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        let s = (&s + s.transpose()) * 0.5;
        let Some(chol) = s.clone().cholesky() else {
            let min_eig = SymmetricEigen::new(s)
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            return Err(Error::DegenerateData(format!(
                "covariance matrix is not positive definite (smallest eigenvalue {min_eig:.6e})"
            )));
        };
        let ln_det = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(Self { s, n_samples, ln_det })
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn ln_det(&self) -> f64 {
        self.ln_det
    }
}

/// Unbiased sample covariance (divisor `N - 1`) of the dataset columns,
/// symmetrized by averaging with its transpose.
pub fn sample_covariance(data: &Dataset) -> Result<CovMatrix> {
    let x = data.values();
    let n = x.nrows();
    let means = x.row_mean();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= &means;
    }
    let s = (centered.transpose() * &centered) / (n as f64 - 1.0);
    let s = (&s + s.transpose()) * 0.5;
    CovMatrix::new(s, n)
}
