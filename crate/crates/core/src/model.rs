//! Population common-factor models `Σ = ΛΦΛᵀ + Ψ²` with independent-cluster
//! loadings.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::linalg::{LinalgError, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("variables per factor must be 5 or 10, got {0}")]
    UnsupportedBlockSize(usize),
    #[error("number of factors must be at least 1")]
    NoFactors,
    #[error("factor correlation {rho} is outside the positive-definite range ({lower}, 1)")]
    CorrelationOutOfRange { rho: f64, lower: f64 },
    #[error("communality of variable {variable} is {communality}, must be below 1")]
    CommunalityTooLarge { variable: usize, communality: f64 },
    #[error("factor correlation matrix must be symmetric with unit diagonal")]
    InvalidPhi,
    #[error("loadings have {loadings} factors but phi is {phi}x{phi}")]
    ShapeMismatch { loadings: usize, phi: usize },
    #[error("implied covariance matrix is not positive definite")]
    SigmaNotPositiveDefinite,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Salient loading level of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LoadingLevel {
    /// Salient loadings .40 to .60 (mean .50).
    Low,
    /// Salient loadings .60 to .80 (mean .70).
    High,
}

impl LoadingLevel {
    pub const ALL: [LoadingLevel; 2] = [LoadingLevel::Low, LoadingLevel::High];

    /// The five distinct salient loadings of one block.
    pub fn salient_values(self) -> [f64; 5] {
        match self {
            LoadingLevel::Low => [0.40, 0.45, 0.50, 0.55, 0.60],
            LoadingLevel::High => [0.60, 0.65, 0.70, 0.75, 0.80],
        }
    }

    pub fn mean_loading(self) -> f64 {
        match self {
            LoadingLevel::Low => 0.50,
            LoadingLevel::High => 0.70,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LoadingLevel::Low => "low",
            LoadingLevel::High => "high",
        }
    }
}

impl fmt::Display for LoadingLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for LoadingLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" | "l" | ".50" | "0.50" | "0.5" | ".5" | "lambda50" => Ok(LoadingLevel::Low),
            "high" | "h" | ".70" | "0.70" | "0.7" | ".7" | "lambda70" => Ok(LoadingLevel::High),
            other => Err(format!("unknown loading level '{other}' (expected low or high)")),
        }
    }
}

/// Independent-clusters loadings: `q` blocks of `per_factor` variables, each
/// loading only on its own factor.
///
/// With 10 variables per factor every salient value appears twice in a row
/// (.40, .40, .45, .45, ...).
pub fn build_population_loadings(
    q: usize,
    per_factor: usize,
    level: LoadingLevel,
) -> Result<Matrix, ModelError> {
    if q == 0 {
        return Err(ModelError::NoFactors);
    }
    let repeat = match per_factor {
        5 => 1,
        10 => 2,
        other => return Err(ModelError::UnsupportedBlockSize(other)),
    };
    let values = level.salient_values();
    Ok(Matrix::from_fn(q * per_factor, q, |i, j| {
        if i / per_factor == j {
            values[(i % per_factor) / repeat]
        } else {
            0.0
        }
    }))
}

/// `q x q` correlation matrix with `rho` everywhere off the diagonal.
pub fn build_uniform_phi(q: usize, rho: f64) -> Result<Matrix, ModelError> {
    if q == 0 {
        return Err(ModelError::NoFactors);
    }
    let lower = if q > 1 { -1.0 / (q as f64 - 1.0) } else { f64::NEG_INFINITY };
    if q > 1 && !(rho > lower && rho < 1.0) {
        return Err(ModelError::CorrelationOutOfRange { rho, lower });
    }
    Ok(Matrix::from_fn(q, q, |i, j| if i == j { 1.0 } else { rho }))
}

/// A population factor model and its implied correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationModel {
    pub lambda: Matrix,
    pub phi: Matrix,
    /// Unique variances, `1 - communality`.
    pub psi2: Vec<f64>,
    /// Implied correlation matrix `ΛΦΛᵀ + diag(ψ²)`.
    pub sigma: Matrix,
}

impl PopulationModel {
    /// Common part `ΛΦΛᵀ`.
    pub fn common(&self) -> Matrix {
        self.lambda
            .matmul(&self.phi)
            .and_then(|lp| lp.matmul(&self.lambda.transpose()))
            .expect("shapes checked at construction")
    }

    pub fn variables(&self) -> usize {
        self.lambda.rows()
    }

    pub fn factors(&self) -> usize {
        self.lambda.cols()
    }
}

/// Builds `Σ = ΛΦΛᵀ + Ψ²` with uniquenesses chosen so that `diag(Σ) = 1`.
pub fn build_population_model(lambda: &Matrix, phi: &Matrix) -> Result<PopulationModel, ModelError> {
    let q = lambda.cols();
    if phi.shape() != (q, q) {
        return Err(ModelError::ShapeMismatch {
            loadings: q,
            phi: phi.rows(),
        });
    }
    if phi.asymmetry() > 1e-12 || phi.diagonal().iter().any(|d| (d - 1.0).abs() > 1e-12) {
        return Err(ModelError::InvalidPhi);
    }
    if phi.cholesky_lower().is_err() {
        return Err(ModelError::InvalidPhi);
    }
    let common = lambda.matmul(phi)?.matmul(&lambda.transpose())?.symmetrize()?;
    let mut psi2 = Vec::with_capacity(lambda.rows());
    for (i, h2) in common.diagonal().into_iter().enumerate() {
        if !(h2 < 1.0) {
            return Err(ModelError::CommunalityTooLarge {
                variable: i + 1,
                communality: h2,
            });
        }
        psi2.push(1.0 - h2);
    }
    let sigma = Matrix::from_fn(common.rows(), common.cols(), |i, j| {
        if i == j {
            1.0
        } else {
            common[(i, j)]
        }
    });
    if sigma.cholesky_lower().is_err() {
        return Err(ModelError::SigmaNotPositiveDefinite);
    }
    Ok(PopulationModel {
        lambda: lambda.clone(),
        phi: phi.clone(),
        psi2,
        sigma,
    })
}
