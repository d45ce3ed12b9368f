#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod example;
pub mod extraction;
pub mod linalg;
pub mod model;
pub mod report;
pub mod rotation;
pub mod simulation;

#[cfg(test)]
mod testutil;

pub use linalg::{LinalgError, Matrix, SymEigen, ThinSvd};
pub use rotation::{
    block_mean_loadings, build_icm_target, factor_correlations, omt_rotate,
    orthogonal_target_rotate, ot_rotate, tucker_congruence, Method, RotationError,
    RotationOptions, RotationSolution, TargetSpec,
};
pub use extraction::{uls_extract, uls_extract_with, ExtractionError, ExtractionOptions, ExtractionResult};
pub use model::{
    build_population_loadings, build_population_model, build_uniform_phi, LoadingLevel,
    ModelError, PopulationModel,
};
pub use simulation::{
    rng_next_standard_normal, run_condition, run_study, sample_correlation, ConditionResult,
    Preset, ReplicationOutcome, RngState, SimulationCondition, SimulationError, Summary,
};
