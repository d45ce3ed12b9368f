use rayon::prelude::*;

use crate::extraction::uls_extract;
use crate::linalg::Matrix;
use crate::model::{build_population_loadings, build_population_model, build_uniform_phi};
use crate::rotation::{build_icm_target, omt_rotate, ot_rotate, RotationOptions, RotationSolution, TargetSpec};

use super::rng::{mix_seed, RngState};
use super::{sample_correlation_with_factor, SimulationCondition, SimulationError};

/// Replications per condition when the caller does not say otherwise.
pub const DEFAULT_REPLICATIONS: usize = 200;

/// Statistics from one simulated sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationOutcome {
    pub ot_congruence: f64,
    pub omt_congruence: f64,
    /// Mean of the upper off-diagonal entries of the OT factor correlations.
    pub ot_mean_phi: f64,
    pub omt_mean_phi: f64,
    pub extraction_converged: bool,
    /// A rotation errored or left a factor with non-positive congruence.
    pub rotation_failed: bool,
}

impl ReplicationOutcome {
    pub fn is_valid(&self) -> bool {
        self.extraction_converged && !self.rotation_failed
    }

    fn failed(extraction_converged: bool) -> Self {
        Self {
            ot_congruence: f64::NAN,
            omt_congruence: f64::NAN,
            ot_mean_phi: f64::NAN,
            omt_mean_phi: f64::NAN,
            extraction_converged,
            rotation_failed: extraction_converged,
        }
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// `n - 1` denominator; 0 for a single value, NaN for none.
    pub sd: f64,
}

impl Summary {
    /// Summarises `values` in order (the reduction order is fixed).
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                sd: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n == 1 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        };
        Self { mean, sd }
    }
}

/// Aggregated statistics of one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResult {
    pub condition: SimulationCondition,
    pub replications_requested: usize,
    pub replications_valid: usize,
    pub extraction_failures: usize,
    pub rotation_failures: usize,
    pub ot_congruence: Summary,
    pub omt_congruence: Summary,
    pub ot_mean_phi: Summary,
    pub omt_mean_phi: Summary,
    /// `ot_mean_phi.mean - rho`.
    pub bias_ot: f64,
    /// `omt_mean_phi.mean - rho`.
    pub bias_omt: f64,
}

impl ConditionResult {
    fn aggregate(
        condition: SimulationCondition,
        outcomes: &[ReplicationOutcome],
    ) -> ConditionResult {
        let valid: Vec<&ReplicationOutcome> = outcomes.iter().filter(|o| o.is_valid()).collect();
        let collect = |f: fn(&ReplicationOutcome) -> f64| -> Vec<f64> {
            valid.iter().map(|o| f(o)).collect()
        };
        let ot_mean_phi = Summary::of(&collect(|o| o.ot_mean_phi));
        let omt_mean_phi = Summary::of(&collect(|o| o.omt_mean_phi));
        ConditionResult {
            condition,
            replications_requested: outcomes.len(),
            replications_valid: valid.len(),
            extraction_failures: outcomes.iter().filter(|o| !o.extraction_converged).count(),
            rotation_failures: outcomes
                .iter()
                .filter(|o| o.extraction_converged && o.rotation_failed)
                .count(),
            ot_congruence: Summary::of(&collect(|o| o.ot_congruence)),
            omt_congruence: Summary::of(&collect(|o| o.omt_congruence)),
            bias_ot: ot_mean_phi.mean - condition.rho,
            bias_omt: omt_mean_phi.mean - condition.rho,
            ot_mean_phi,
            omt_mean_phi,
        }
    }
}

/// Everything a replication needs that does not depend on the draw.
struct ConditionSetup {
    condition: SimulationCondition,
    chol: Matrix,
    target: TargetSpec,
    options: RotationOptions,
}

impl ConditionSetup {
    fn new(condition: &SimulationCondition) -> Result<Self, SimulationError> {
        condition.validate()?;
        let lambda = build_population_loadings(condition.q, condition.per_factor, condition.level)?;
        let phi = build_uniform_phi(condition.q, condition.rho)?;
        let model = build_population_model(&lambda, &phi)?;
        let target = build_icm_target(condition.p(), condition.q)
            .map_err(|e| SimulationError::InvalidCondition(e.to_string()))?;
        Ok(Self {
            condition: *condition,
            chol: model.sigma.cholesky_lower()?,
            target,
            options: RotationOptions::default(),
        })
    }

    fn replicate(&self, seed: u64, index: u64) -> ReplicationOutcome {
        let mut rng = RngState::for_stream(seed, index);
        let r = match sample_correlation_with_factor(&self.chol, self.condition.n, &mut rng) {
            Ok(r) => r,
            Err(_) => return ReplicationOutcome::failed(false),
        };
        let fit = match uls_extract(&r, self.condition.q) {
            Ok(fit) if fit.converged => fit,
            _ => return ReplicationOutcome::failed(false),
        };
        let ot = ot_rotate(&fit.loadings, &self.target);
        let omt = omt_rotate(&fit.loadings, &self.target, &self.options);
        match (ot, omt) {
            (Ok(ot), Ok(omt)) => {
                let rotation_failed = !all_positive(&ot) || !all_positive(&omt);
                ReplicationOutcome {
                    ot_congruence: ot.congruence,
                    omt_congruence: omt.congruence,
                    ot_mean_phi: mean_off_diagonal(&ot.phi),
                    omt_mean_phi: mean_off_diagonal(&omt.phi),
                    extraction_converged: true,
                    rotation_failed,
                }
            }
            _ => ReplicationOutcome::failed(true),
        }
    }
}

fn all_positive(sol: &RotationSolution) -> bool {
    sol.per_factor_congruence.iter().all(|&c| c > 0.0)
}

/// Mean of the upper off-diagonal entries; 0 for a single factor.
fn mean_off_diagonal(phi: &Matrix) -> f64 {
    let q = phi.rows();
    if q < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..q {
        for j in (i + 1)..q {
            sum += phi[(i, j)];
        }
    }
    sum / (q * (q - 1) / 2) as f64
}

/// Runs replication `index` of `condition` under `seed` on its own.
pub fn replicate(
    condition: &SimulationCondition,
    seed: u64,
    index: u64,
) -> Result<ReplicationOutcome, SimulationError> {
    Ok(ConditionSetup::new(condition)?.replicate(seed, index))
}

/// Runs `reps` replications of one condition. Replication `k` uses stream `k`
/// under `seed`; failed replications are counted and excluded from the
/// summaries.
///
/// Replications are spread over the current rayon pool.
pub fn run_condition(
    condition: &SimulationCondition,
    reps: usize,
    seed: u64,
) -> Result<ConditionResult, SimulationError> {
    if reps == 0 {
        return Err(SimulationError::NoReplications);
    }
    let setup = ConditionSetup::new(condition)?;
    let outcomes: Vec<ReplicationOutcome> = (0..reps as u64)
        .into_par_iter()
        .map(|k| setup.replicate(seed, k))
        .collect();
    Ok(ConditionResult::aggregate(*condition, &outcomes))
}

/// Runs every condition on a dedicated pool of `parallelism` threads.
/// Condition `i` gets seed `mix_seed(seed, i)`.
pub fn run_study(
    conditions: &[SimulationCondition],
    reps: usize,
    seed: u64,
    parallelism: usize,
) -> Result<Vec<ConditionResult>, SimulationError> {
    if conditions.is_empty() {
        return Err(SimulationError::NoConditions);
    }
    if reps == 0 {
        return Err(SimulationError::NoReplications);
    }
    for c in conditions {
        c.validate()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| SimulationError::ThreadPool(e.to_string()))?;
    pool.install(|| {
        conditions
            .par_iter()
            .enumerate()
            .map(|(i, c)| run_condition(c, reps, mix_seed(seed, i as u64)))
            .collect()
    })
}
