//! Fixtures shared by the benchmarks.

use rotafactor_core::{
    build_icm_target, build_population_loadings, build_population_model, build_uniform_phi,
    sample_correlation, uls_extract, LoadingLevel, Matrix, RngState, TargetSpec,
};

/// Unrotated loadings extracted from one seeded sample of the block model
/// with `q` factors, five variables each, low loadings and factor
/// correlation .5, together with the matching block target.
pub fn extracted_loadings(q: usize, n: usize, seed: u64) -> (Matrix, TargetSpec) {
    let lambda = build_population_loadings(q, 5, LoadingLevel::Low).expect("valid block size");
    let phi = build_uniform_phi(q, 0.5).expect("valid correlation");
    let model = build_population_model(&lambda, &phi).expect("positive definite model");
    let mut rng = RngState::new(seed);
    let r = sample_correlation(&model.sigma, n, &mut rng).expect("n exceeds p");
    let fit = uls_extract(&r, q).expect("extraction runs");
    (fit.loadings, build_icm_target(5 * q, q).expect("block target"))
}

/// Population correlation matrix of the same model.
pub fn population_sigma(q: usize) -> Matrix {
    let lambda = build_population_loadings(q, 5, LoadingLevel::Low).expect("valid block size");
    let phi = build_uniform_phi(q, 0.5).expect("valid correlation");
    build_population_model(&lambda, &phi).expect("positive definite model").sigma
}
