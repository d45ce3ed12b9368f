use crate::linalg::{LinalgError, Matrix};

use super::{
    check_shapes, factor_correlations, orthogonal_target_rotate, pattern_column_scale,
    tucker_congruence, Method, RotationError, RotationOptions, RotationSolution, TargetSpec,
};

/// Salient-weighted mean loadings per target block:
/// `Λ₁ₘ = (Λ₁ ∘ Λ_T)ᵀ Λ₁ ((Λ₁ ∘ Λ_T)ᵀ Λ_T)⁻¹`.
///
/// Row `j` summarises the variables that are salient on factor `j`.
pub fn block_mean_loadings(l1: &Matrix, target: &TargetSpec) -> Result<Matrix, RotationError> {
    check_shapes(l1, target)?;
    let t = target.matrix();
    let weighted = l1.hadamard(t)?;
    let weights = weighted.tmatmul(t)?;
    let weights_inv = weights.inverse().map_err(|err| match err {
        LinalgError::Singular { .. } => {
            let factor = weights
                .diagonal()
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map_or(1, |(j, _)| j + 1);
            RotationError::SingularBlockWeights { factor }
        }
        other => other.into(),
    })?;
    Ok(weighted.tmatmul(l1)?.matmul(&weights_inv)?)
}

struct Candidate {
    pattern: Matrix,
    transform: Matrix,
    congruence: f64,
    per_factor: Vec<f64>,
    ridge: f64,
}

/// Oblique mean-target rotation.
///
/// Steps: orthogonal Procrustes toward the target; block mean loadings
/// `Λ₁ₘ`; oblique transform `T = (Λ₁ₘᵀΛ₁ₘ)⁻¹Λ₁ₘᵀ`, normalised as
/// `T_n = diag(TᵀT)^{-1/2}·T`; pattern `Λ₁·T_n·diag((T_nᵀT_n)⁻¹)^{1/2}`.
///
/// While `κ(Λ₁ₘᵀΛ₁ₘ)` exceeds `opts.kappa_max` a ridge of `opts.ridge_step`
/// is added and the candidate re-evaluated; the candidate with the highest
/// mean congruence (first one wins ties) is returned.
pub fn omt_rotate(
    l_u: &Matrix,
    target: &TargetSpec,
    opts: &RotationOptions,
) -> Result<RotationSolution, RotationError> {
    opts.validate()?;
    check_shapes(l_u, target)?;

    let orth = orthogonal_target_rotate(l_u, target)?;
    let l1 = &orth.loadings;
    let l1m = block_mean_loadings(l1, target)?;
    let gram = l1m.tmatmul(&l1m)?;
    let first_kappa = gram.condition_number()?;

    let mut help = gram;
    let mut ridge = 0.0;
    let mut best: Option<Candidate> = None;
    for _ in 0..opts.max_ridge_iters {
        let kappa = if ridge == 0.0 {
            first_kappa
        } else {
            help.condition_number()?
        };
        match evaluate(&help, &l1m, l1, target) {
            Ok((pattern, transform)) => {
                let (congruence, per_factor) = tucker_congruence(&pattern, target.matrix())?;
                if best.as_ref().is_none_or(|b| congruence > b.congruence) {
                    best = Some(Candidate {
                        pattern,
                        transform,
                        congruence,
                        per_factor,
                        ridge,
                    });
                }
            }
            Err(RotationError::Linalg(LinalgError::Singular { .. })) => {}
            Err(other) => return Err(other),
        }
        if kappa > opts.kappa_max {
            help = help.add_diag(opts.ridge_step);
            ridge += opts.ridge_step;
        } else {
            break;
        }
    }

    let best = best.ok_or(RotationError::RidgeExhausted)?;
    let phi = factor_correlations(&best.pattern, l_u)?;
    Ok(RotationSolution {
        method: Method::MeanTarget,
        transform: orth.transform.matmul(&best.transform)?,
        pattern: best.pattern,
        phi,
        congruence: best.congruence,
        per_factor_congruence: best.per_factor,
        kappa: first_kappa,
        ridge_applied: best.ridge,
    })
}

/// One candidate for a given (possibly ridged) `Λ₁ₘᵀΛ₁ₘ`. Returns the pattern
/// and the oblique part of the transform (applied after the orthogonal step).
fn evaluate(
    help: &Matrix,
    l1m: &Matrix,
    l1: &Matrix,
    target: &TargetSpec,
) -> Result<(Matrix, Matrix), RotationError> {
    // The oblique target for the block means is I_q, so Λ₁ₘᵀ·I_q = Λ₁ₘᵀ.
    let t = help.inverse()?.matmul(&l1m.transpose())?;
    let norms = t.tmatmul(&t)?.diagonal();
    if let Some(j) = norms.iter().position(|&v| !(v > 0.0)) {
        return Err(RotationError::SingularBlockWeights { factor: j + 1 });
    }
    let row_scale: Vec<f64> = norms.iter().map(|v| 1.0 / v.sqrt()).collect();
    let t_n = t.scale_rows(&row_scale);
    let col_scale = pattern_column_scale(&t_n)?;
    let oblique = t_n.scale_cols(&col_scale);
    debug_assert_eq!(oblique.cols(), target.factors());
    Ok((l1.matmul(&oblique)?, oblique))
}
