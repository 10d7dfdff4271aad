//! Maximum-likelihood fitting and scoring of recursive linear-Gaussian
//! structural equation models on covariance matrices.

mod cov;
mod dataset;
mod fit;

pub use cov::{sample_covariance, CovMatrix};
pub use dataset::Dataset;
pub use fit::{complexity, ml_fit, FitResult};
