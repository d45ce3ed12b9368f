//! Monte-Carlo study of rotated factor inter-correlations.
//!
//! Each replication draws a multivariate-normal sample from a population
//! independent-clusters model, extracts the correct number of factors by
//! unweighted least squares, and rotates the unrotated loadings with both
//! plain and mean-target oblique rotation against the block target.
//!
//! Reproducibility: a condition's replications use ChaCha streams
//! `0..reps` under the condition seed; in a study the condition seed is
//! `mix_seed(seed, condition_index)`. Results are collected by index and
//! reduced sequentially, so thread count never changes a single bit.

mod condition;
mod engine;
mod rng;

use thiserror::Error;

use crate::linalg::{LinalgError, Matrix};
use crate::model::ModelError;

pub use condition::{
    parse_conditions_csv, Preset, SimulationCondition, STUDY_BLOCK_SIZES, STUDY_FACTORS,
    STUDY_RHOS, STUDY_SAMPLE_SIZES,
};
pub use engine::{
    replicate, run_condition, run_study, ConditionResult, ReplicationOutcome, Summary,
    DEFAULT_REPLICATIONS,
};
pub use rng::{mix_seed, rng_next_standard_normal, RngState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("invalid condition: {0}")]
    InvalidCondition(String),
    #[error("unknown preset '{0}' (expected paper-table2, paper-tableA1 or paper-all)")]
    UnknownPreset(String),
    #[error("conditions file line {line}: {message}")]
    ConditionsFile { line: usize, message: String },
    #[error("sample size {n} must exceed the number of variables {p}")]
    SampleTooSmall { n: usize, p: usize },
    #[error("replication count must be at least 1")]
    NoReplications,
    #[error("condition list is empty")]
    NoConditions,
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Pearson correlation matrix of `n` draws from `N(0, sigma)`.
pub fn sample_correlation(
    sigma: &Matrix,
    n: usize,
    rng: &mut RngState,
) -> Result<Matrix, SimulationError> {
    let chol = sigma.cholesky_lower()?;
    sample_correlation_with_factor(&chol, n, rng)
}

/// Same as [`sample_correlation`] for a precomputed lower Cholesky factor.
pub(crate) fn sample_correlation_with_factor(
    chol: &Matrix,
    n: usize,
    rng: &mut RngState,
) -> Result<Matrix, SimulationError> {
    let p = chol.rows();
    if n <= p {
        return Err(SimulationError::SampleTooSmall { n, p });
    }
    let mut data = vec![0.0; n * p];
    let mut z = vec![0.0; p];
    for row in data.chunks_exact_mut(p) {
        for zi in z.iter_mut() {
            *zi = rng.next_standard_normal();
        }
        for (i, x) in row.iter_mut().enumerate() {
            *x = chol.row(i)[..=i].iter().zip(&z).map(|(l, zk)| l * zk).sum();
        }
    }

    let mut means = vec![0.0; p];
    for row in data.chunks_exact(p) {
        for (m, x) in means.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in means.iter_mut() {
        *m /= n as f64;
    }
    for row in data.chunks_exact_mut(p) {
        for (x, m) in row.iter_mut().zip(&means) {
            *x -= m;
        }
    }

    let mut cross = vec![0.0; p * p];
    for row in data.chunks_exact(p) {
        for i in 0..p {
            let xi = row[i];
            let dst = &mut cross[i * p + i..(i + 1) * p];
            for (c, xj) in dst.iter_mut().zip(&row[i..]) {
                *c += xi * xj;
            }
        }
    }
    let sd: Vec<f64> = (0..p).map(|i| cross[i * p + i].sqrt()).collect();
    Ok(Matrix::from_fn(p, p, |i, j| {
        if i == j {
            1.0
        } else {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            cross[a * p + b] / (sd[a] * sd[b])
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::table1_loadings;
    use crate::model::build_population_model;

    #[test]
    fn sample_correlation_is_a_correlation_matrix() {
        let model = build_population_model(&table1_loadings(), &Matrix::identity(3)).unwrap();
        let mut rng = RngState::new(5);
        let r = sample_correlation(&model.sigma, 50, &mut rng).unwrap();
        assert_eq!(r.diagonal(), vec![1.0; 18]);
        assert_eq!(r.asymmetry(), 0.0);
        assert!(r.as_slice().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn identity_population_gives_near_zero_correlations() {
        let mut rng = RngState::new(11);
        let r = sample_correlation(&Matrix::identity(3), 100_000, &mut rng).unwrap();
        assert!(r.max_abs_diff(&Matrix::identity(3)) < 0.02);
    }

    #[test]
    fn large_samples_approach_the_population() {
        let model = build_population_model(&table1_loadings(), &Matrix::identity(3)).unwrap();
        let mut rng = RngState::new(12);
        let r = sample_correlation(&model.sigma, 100_000, &mut rng).unwrap();
        assert!(r.max_abs_diff(&model.sigma) < 0.02);
    }

    #[test]
    fn sample_correlation_errors() {
        let mut rng = RngState::new(1);
        assert!(matches!(
            sample_correlation(&Matrix::identity(4), 4, &mut rng),
            Err(SimulationError::SampleTooSmall { n: 4, p: 4 })
        ));
        let indefinite = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(
            sample_correlation(&indefinite, 10, &mut rng),
            Err(SimulationError::Linalg(LinalgError::NotPositiveDefinite { .. }))
        ));
    }
}
