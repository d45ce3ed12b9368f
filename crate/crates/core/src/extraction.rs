//! Unweighted least squares factor extraction by iterated principal axes.

use thiserror::Error;

use crate::linalg::{LinalgError, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractionError {
    #[error("correlation matrix must be square and symmetric")]
    NotSymmetric,
    #[error("correlation matrix must have a unit diagonal (entry {index} is {value})")]
    NotUnitDiagonal { index: usize, value: f64 },
    #[error("need 1 <= q < p, got q = {q} for p = {p}")]
    BadFactorCount { p: usize, q: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Iteration control for [`uls_extract_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionOptions {
    /// Stop when no communality moves by more than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionResult {
    /// Unrotated loadings, `p x q`, identified only up to an orthogonal rotation.
    pub loadings: Matrix,
    pub communalities: Vec<f64>,
    /// `Σ_{i<j} (r_ij − (ΛΛᵀ)_ij)²` at the returned loadings.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// A communality reached 1 and was clamped.
    pub heywood: bool,
    /// The squared-multiple-correlation start failed and 0.5 was used.
    pub smc_fallback: bool,
    /// Objective after every iteration.
    pub objective_trace: Vec<f64>,
}

/// Sum of squared off-diagonal residuals for loadings `l` against `r`.
pub fn uls_objective(r: &Matrix, l: &Matrix) -> f64 {
    let p = r.rows();
    let mut total = 0.0;
    for i in 0..p {
        let li = l.row(i);
        for j in (i + 1)..p {
            let fitted: f64 = li.iter().zip(l.row(j)).map(|(a, b)| a * b).sum();
            let resid = r[(i, j)] - fitted;
            total += resid * resid;
        }
    }
    total
}

/// [`uls_extract_with`] using the default tolerance (1e-6) and iteration cap (1000).
pub fn uls_extract(r: &Matrix, q: usize) -> Result<ExtractionResult, ExtractionError> {
    uls_extract_with(r, q, &ExtractionOptions::default())
}

/// Fits `q` common factors to the correlation matrix `r`.
///
/// Starts from squared multiple correlations, then alternates between the
/// best rank-`q` approximation of the reduced correlation matrix and
/// resetting its diagonal to the fitted communalities.
pub fn uls_extract_with(
    r: &Matrix,
    q: usize,
    opts: &ExtractionOptions,
) -> Result<ExtractionResult, ExtractionError> {
    if !r.is_square() || r.asymmetry() > 1e-10 {
        return Err(ExtractionError::NotSymmetric);
    }
    let p = r.rows();
    if q == 0 || q >= p {
        return Err(ExtractionError::BadFactorCount { p, q });
    }
    if let Some((index, value)) = r
        .diagonal()
        .into_iter()
        .enumerate()
        .find(|(_, d)| (d - 1.0).abs() > 1e-8)
    {
        return Err(ExtractionError::NotUnitDiagonal { index, value });
    }

    let (mut h, smc_fallback) = match r.inverse() {
        Ok(inv) => (
            inv.diagonal()
                .iter()
                .map(|d| (1.0 - 1.0 / d).clamp(0.0, 1.0))
                .collect::<Vec<_>>(),
            false,
        ),
        Err(_) => (vec![0.5; p], true),
    };

    let mut reduced = r.clone();
    let mut loadings = Matrix::zeros(p, q);
    let mut objective_trace = Vec::new();
    let mut converged = false;
    let mut heywood = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        reduced = with_diagonal(&reduced, &h);
        loadings = top_loadings(&reduced, q)?;
        let mut change: f64 = 0.0;
        for (i, hi) in h.iter_mut().enumerate() {
            let mut fitted = loadings.row(i).iter().map(|v| v * v).sum::<f64>();
            if fitted > 1.0 {
                fitted = 1.0;
                heywood = true;
            }
            change = change.max((fitted - *hi).abs());
            *hi = fitted;
        }
        objective_trace.push(uls_objective(r, &loadings));
        if change < opts.tol {
            converged = true;
            break;
        }
    }

    let communalities = (0..p)
        .map(|i| loadings.row(i).iter().map(|v| v * v).sum::<f64>().min(1.0))
        .collect();
    Ok(ExtractionResult {
        objective: objective_trace.last().copied().unwrap_or(f64::NAN),
        loadings,
        communalities,
        iterations,
        converged,
        heywood,
        smc_fallback,
        objective_trace,
    })
}

fn with_diagonal(m: &Matrix, diag: &[f64]) -> Matrix {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| if i == j { diag[i] } else { m[(i, j)] })
}

/// Leading `q` eigenvectors scaled by the square roots of their (floored)
/// eigenvalues.
fn top_loadings(reduced: &Matrix, q: usize) -> Result<Matrix, LinalgError> {
    let eig = reduced.sym_eigen()?;
    let scale: Vec<f64> = eig.values[..q].iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok(Matrix::from_fn(reduced.rows(), q, |i, j| {
        eig.vectors[(i, j)] * scale[j]
    }))
}
