use crate::linalg::Matrix;

use super::{check_shapes, RotationError, TargetSpec};

/// Output of the orthogonal target step.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalRotation {
    /// Rotated loadings `l_u · transform`.
    pub loadings: Matrix,
    /// Orthogonal `q x q` transform.
    pub transform: Matrix,
}

/// Orthogonal Procrustes rotation of `l_u` toward `target`.
///
/// The transform minimising `‖l_u·T − Λ_T‖_F` over orthogonal `T` is `U·Vᵀ`
/// from the SVD of `S = l_uᵀ·Λ_T`.
pub fn orthogonal_target_rotate(
    l_u: &Matrix,
    target: &TargetSpec,
) -> Result<OrthogonalRotation, RotationError> {
    check_shapes(l_u, target)?;
    let s = l_u.tmatmul(target.matrix())?;
    let svd = s.svd_thin()?;
    let s_max = svd.s[0];
    let s_min = *svd.s.last().expect("q >= 1");
    if !(s_max > 0.0) || s_min < 1e-10 * s_max {
        let ratio = if s_max > 0.0 { s_min / s_max } else { 0.0 };
        return Err(RotationError::TargetNotIdentified { ratio });
    }
    let transform = svd.u.matmul(&svd.v.transpose())?;
    let loadings = l_u.matmul(&transform)?;
    Ok(OrthogonalRotation {
        loadings,
        transform,
    })
}
