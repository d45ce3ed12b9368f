//! Target rotation of unrotated factor loadings.
//!
//! Two oblique methods share one pipeline surface:
//!
//! * [`omt_rotate`] - oblique mean-target rotation. The loadings are first
//!   rotated orthogonally toward the target, then each block of salient
//!   variables is summarised by its salient-weighted mean loadings, and the
//!   oblique transformation is solved on those `q x q` block means instead of
//!   on the individual cross-loadings. An optional ridge loop guards against
//!   an ill-conditioned block-mean matrix.
//! * [`ot_rotate`] - conventional oblique target (Procrustes) rotation, which
//!   solves the least-squares transformation against every target cell.
//!
//! Both return a [`RotationSolution`] whose factor correlations are computed
//! from the rotated pattern and the original unrotated loadings, so that
//! `pattern · Φ · patternᵀ` reproduces `Λ_u · Λ_uᵀ`.

mod omt;
mod ot;
mod procrustes;
mod target;

use thiserror::Error;

use crate::linalg::{dot, LinalgError, Matrix};

pub use omt::{block_mean_loadings, omt_rotate};
pub use ot::ot_rotate;
pub use procrustes::{orthogonal_target_rotate, OrthogonalRotation};
pub use target::{build_icm_target, TargetSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RotationError {
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("loadings are {loadings_rows}x{loadings_cols} but target is {target_rows}x{target_cols}")]
    ShapeMismatch {
        loadings_rows: usize,
        loadings_cols: usize,
        target_rows: usize,
        target_cols: usize,
    },
    #[error("invalid rotation options: {0}")]
    InvalidOptions(String),
    #[error("target not identified against loadings (singular value ratio {ratio:e})")]
    TargetNotIdentified { ratio: f64 },
    #[error("salient loadings of factor {factor} sum to zero; block means are undefined")]
    SingularBlockWeights { factor: usize },
    #[error("column {column} has zero norm; congruence is undefined")]
    ZeroColumn { column: usize },
    #[error("block-mean matrix stayed singular through the ridge loop")]
    RidgeExhausted,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Knobs for the ridge safeguard in [`omt_rotate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationOptions {
    /// Condition number of `Λ₁ₘᵀΛ₁ₘ` above which a ridge constant is added.
    pub kappa_max: f64,
    /// Amount added to the diagonal per ridge step.
    pub ridge_step: f64,
    /// Upper bound on candidate evaluations in the ridge loop.
    pub max_ridge_iters: usize,
}

impl Default for RotationOptions {
    fn default() -> Self {
        Self {
            kappa_max: 20.0,
            ridge_step: 0.01,
            max_ridge_iters: 100,
        }
    }
}

impl RotationOptions {
    pub fn validate(&self) -> Result<(), RotationError> {
        if !(self.kappa_max > 1.0) {
            return Err(RotationError::InvalidOptions(format!(
                "kappa_max must exceed 1, got {}",
                self.kappa_max
            )));
        }
        if !(self.ridge_step > 0.0) || !self.ridge_step.is_finite() {
            return Err(RotationError::InvalidOptions(format!(
                "ridge_step must be positive, got {}",
                self.ridge_step
            )));
        }
        if self.max_ridge_iters == 0 {
            return Err(RotationError::InvalidOptions(
                "max_ridge_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Which oblique method produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MeanTarget,
    Target,
}

impl Method {
    pub fn short_name(self) -> &'static str {
        match self {
            Method::MeanTarget => "omt",
            Method::Target => "ot",
        }
    }
}

/// Result of an oblique rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationSolution {
    pub method: Method,
    /// Rotated factor pattern, `p x q`.
    pub pattern: Matrix,
    /// Factor inter-correlations, `q x q`, unit diagonal.
    pub phi: Matrix,
    /// Mean Tucker congruence of the pattern with the target.
    pub congruence: f64,
    pub per_factor_congruence: Vec<f64>,
    /// Condition number of the block-mean cross-product on the first pass
    /// (mean-target only; 1 for plain target rotation).
    pub kappa: f64,
    /// Ridge constant in effect for the retained candidate (0 for plain
    /// target rotation).
    pub ridge_applied: f64,
    /// Total `q x q` transformation: `pattern = l_u · transform`.
    pub transform: Matrix,
}

/// Tucker's congruence between corresponding columns of `a` and `b`.
///
/// Returns the mean over columns and the per-column coefficients.
pub fn tucker_congruence(a: &Matrix, b: &Matrix) -> Result<(f64, Vec<f64>), RotationError> {
    if a.shape() != b.shape() {
        return Err(RotationError::ShapeMismatch {
            loadings_rows: a.rows(),
            loadings_cols: a.cols(),
            target_rows: b.rows(),
            target_cols: b.cols(),
        });
    }
    let mut per_factor = Vec::with_capacity(a.cols());
    for j in 0..a.cols() {
        let (x, y) = (a.column(j), b.column(j));
        let xx = dot(&x, &x);
        let yy = dot(&y, &y);
        if xx == 0.0 || yy == 0.0 {
            return Err(RotationError::ZeroColumn { column: j + 1 });
        }
        per_factor.push(dot(&x, &y) / (xx * yy).sqrt());
    }
    let mean = per_factor.iter().sum::<f64>() / per_factor.len() as f64;
    Ok((mean, per_factor))
}

/// Factor inter-correlations implied by a rotated pattern:
/// `Φ = (PᵀP)⁻¹ Pᵀ (Λ_u Λ_uᵀ) P (PᵀP)⁻¹`, symmetrised.
pub fn factor_correlations(pattern: &Matrix, l_u: &Matrix) -> Result<Matrix, RotationError> {
    if pattern.shape() != l_u.shape() {
        return Err(RotationError::ShapeMismatch {
            loadings_rows: l_u.rows(),
            loadings_cols: l_u.cols(),
            target_rows: pattern.rows(),
            target_cols: pattern.cols(),
        });
    }
    // With A = (PᵀP)⁻¹ Pᵀ Λ_u the product collapses to A·Aᵀ.
    let ptp_inv = pattern.tmatmul(pattern)?.inverse()?;
    let a = ptp_inv.matmul(&pattern.tmatmul(l_u)?)?;
    Ok(a.gram_rows().symmetrize()?)
}

pub(crate) fn check_shapes(l_u: &Matrix, target: &TargetSpec) -> Result<(), RotationError> {
    if l_u.shape() != target.matrix().shape() {
        return Err(RotationError::ShapeMismatch {
            loadings_rows: l_u.rows(),
            loadings_cols: l_u.cols(),
            target_rows: target.variables(),
            target_cols: target.factors(),
        });
    }
    Ok(())
}

/// Per-column scale `diag((XᵀX)⁻¹)^{1/2}` used to turn a reference structure
/// into a pattern.
pub(crate) fn pattern_column_scale(t: &Matrix) -> Result<Vec<f64>, RotationError> {
    let inv = t.tmatmul(t)?.inverse()?;
    Ok(inv.diagonal().iter().map(|v| v.sqrt()).collect())
}
