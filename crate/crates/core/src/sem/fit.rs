//! ML estimation of a recursive linear SEM implied by a DAG.

use nalgebra::{DMatrix, DVector};

use super::CovMatrix;
use crate::error::{Error, Result};
use crate::graph::Dag;

/// Scores of one fitted model.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// `(N - 1)` times the ML discrepancy between sample and implied
    /// covariance; non-negative at the optimum up to rounding.
    pub chi2: f64,
    /// Number of arcs (path coefficients) in the model.
    pub complexity: usize,
    /// Degrees of freedom: `p(p+1)/2 - (complexity + p)`.
    pub df: i64,
    /// `chi2 + ln(N) * (complexity + p)`, counting one residual variance
    /// per variable as a free parameter.
    pub bic: f64,
    /// Per-arc path weights as `(from, to, weight)`.
    pub coefficients: Vec<(usize, usize, f64)>,
    /// Residual variance per variable.
    pub residual_variances: Vec<f64>,
}

/// Number of arcs in the model, the second search objective.
pub fn complexity(g: &Dag) -> usize {
    g.arc_count()
}

/// Fits the recursive linear-Gaussian SEM with path diagram `g` to the
/// covariance matrix `s` by per-equation least squares, which is the
/// global ML optimum for recursive models.
///
/// Each variable is regressed on its parents (normal equations on the
/// parent block of `s`); the implied covariance is
/// `(I - B)^-1 Psi (I - B)^-T` and the discrepancy is
/// `F = ln|Sigma| + tr(S Sigma^-1) - ln|S| - p`.
pub fn ml_fit(g: &Dag, s: &CovMatrix) -> Result<FitResult> {
    let p = s.dim();
    if g.n() != p {
        return Err(Error::Structural(format!(
            "model has {} variables, covariance has {p}",
            g.n()
        )));
    }
    let sm = s.matrix();
    let mut beta = DMatrix::<f64>::zeros(p, p);
    let mut psi = vec![0.0f64; p];
    let mut coefficients = Vec::with_capacity(g.arc_count());
    for i in 0..p {
        let parents = g.parents_of(i);
        if parents.is_empty() {
            psi[i] = sm[(i, i)];
            continue;
        }
        let k = parents.len();
        let mut block = DMatrix::<f64>::zeros(k, k);
        let mut rhs = DVector::<f64>::zeros(k);
        for (a, &pa) in parents.iter().enumerate() {
            rhs[a] = sm[(pa, i)];
            for (b, &pb) in parents.iter().enumerate() {
                block[(a, b)] = sm[(pa, pb)];
            }
        }
        let Some(chol) = block.cholesky() else {
            return Err(Error::DegenerateData(format!(
                "singular parent block for variable {i}"
            )));
        };
        let b = chol.solve(&rhs);
        psi[i] = sm[(i, i)] - b.dot(&rhs);
        if psi[i] <= 0.0 {
            return Err(Error::DegenerateData(format!(
                "non-positive residual variance for variable {i}"
            )));
        }
        for (a, &pa) in parents.iter().enumerate() {
            beta[(i, pa)] = b[a];
            coefficients.push((pa, i, b[a]));
        }
    }

    // det(I - B) = 1 for a recursive model, so ln|Sigma| = sum ln psi_i,
    // and tr(S Sigma^-1) = sum_i [(I-B) S (I-B)^T]_ii / psi_i.
    let mut imb = -beta;
    for i in 0..p {
        imb[(i, i)] += 1.0;
    }
    let m = &imb * sm * imb.transpose();
    let mut f_ml = -s.ln_det() - p as f64;
    for i in 0..p {
        f_ml += psi[i].ln() + m[(i, i)] / psi[i];
    }

    let n = s.n_samples() as f64;
    let complexity = g.arc_count();
    let chi2 = (n - 1.0) * f_ml;
    let free_params = complexity + p;
    Ok(FitResult {
        chi2,
        complexity,
        df: (p * (p + 1) / 2) as i64 - free_params as i64,
        bic: chi2 + n.ln() * free_params as f64,
        coefficients,
        residual_variances: psi,
    })
}
