use crate::linalg::Matrix;

use super::{
    check_shapes, factor_correlations, pattern_column_scale, tucker_congruence, Method,
    RotationError, RotationSolution, TargetSpec,
};

/// Conventional oblique target rotation.
///
/// `TT = (l_uᵀl_u)⁻¹ l_uᵀ Λ_T`, rows rescaled by `diag(TTᵀTT)^{-1/2}`, then
/// the reference structure `l_u·TT` is turned into a pattern with
/// `diag((TTᵀTT)⁻¹)^{1/2}`.
pub fn ot_rotate(l_u: &Matrix, target: &TargetSpec) -> Result<RotationSolution, RotationError> {
    check_shapes(l_u, target)?;
    let ls = l_u.tmatmul(l_u)?.inverse()?;
    let tt = ls.matmul(&l_u.tmatmul(target.matrix())?)?;
    let norms = tt.tmatmul(&tt)?.diagonal();
    if norms.iter().any(|&v| !(v > 0.0)) {
        return Err(crate::linalg::LinalgError::Singular { op: "ot_rotate" }.into());
    }
    let row_scale: Vec<f64> = norms.iter().map(|v| 1.0 / v.sqrt()).collect();
    let tt = tt.scale_rows(&row_scale);
    let col_scale = pattern_column_scale(&tt)?;
    let transform = tt.scale_cols(&col_scale);
    let pattern = l_u.matmul(&transform)?;
    let phi = factor_correlations(&pattern, l_u)?;
    let (congruence, per_factor_congruence) = tucker_congruence(&pattern, target.matrix())?;
    Ok(RotationSolution {
        method: Method::Target,
        pattern,
        phi,
        congruence,
        per_factor_congruence,
        kappa: 1.0,
        ridge_applied: 0.0,
        transform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::table1_loadings;
    use crate::rotation::build_icm_target;
    use crate::testutil::lcg_matrix;

    #[test]
    fn table1_ot_values() {
        let target = build_icm_target(18, 3).unwrap();
        let sol = ot_rotate(&table1_loadings(), &target).unwrap();
        // Row 1 loads (.52, .25, -.11); row 2 swaps the cross-loadings.
        let row1 = sol.pattern.row(0);
        let row2 = sol.pattern.row(1);
        assert!((row1[0] - 0.52).abs() <= 0.005);
        assert!((row1[1] - 0.25).abs() <= 0.005);
        assert!((row1[2] + 0.11).abs() <= 0.005);
        assert!((row2[1] + 0.11).abs() <= 0.005);
        assert!((row2[2] - 0.25).abs() <= 0.005);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { -0.22 };
                assert!((sol.phi[(i, j)] - expected).abs() <= 0.005);
            }
        }
        assert_eq!(sol.kappa, 1.0);
        assert_eq!(sol.ridge_applied, 0.0);
    }

    #[test]
    fn perfect_icm_is_unchanged() {
        let target = build_icm_target(10, 2).unwrap();
        let l_u = target.matrix().scale(0.5);
        let sol = ot_rotate(&l_u, &target).unwrap();
        assert!(sol.pattern.max_abs_diff(&l_u) < 1e-12);
        assert!(sol.phi.max_abs_diff(&Matrix::identity(2)) < 1e-12);
    }

    #[test]
    fn common_part_is_preserved() {
        for seed in 0..25 {
            let target = build_icm_target(24, 4).unwrap();
            let l_u = lcg_matrix(24, 4, seed);
            let sol = ot_rotate(&l_u, &target).unwrap();
            let implied = sol.pattern.matmul(&sol.phi).unwrap().matmul(&sol.pattern.transpose()).unwrap();
            assert!(implied.max_abs_diff(&l_u.gram_rows()) < 1e-8);
            assert!(sol.pattern.max_abs_diff(&l_u.matmul(&sol.transform).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_loadings_fail() {
        let target = build_icm_target(4, 2).unwrap();
        let l_u = Matrix::from_rows(&[[0.5, 0.5], [0.4, 0.4], [0.3, 0.3], [0.6, 0.6]]).unwrap();
        assert!(matches!(ot_rotate(&l_u, &target), Err(RotationError::Linalg(_))));
    }
}
