use crate::linalg::Matrix;

use super::RotationError;

/// Binary `p x q` target marking salient loading positions.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    matrix: Matrix,
}

impl TargetSpec {
    /// Wraps a user-supplied target. Entries must be exactly 0 or 1 and every
    /// column needs at least one salient position.
    pub fn new(matrix: Matrix) -> Result<Self, RotationError> {
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                let v = matrix[(i, j)];
                if v != 0.0 && v != 1.0 {
                    return Err(RotationError::InvalidTarget(format!(
                        "entry ({}, {}) is {v}, expected 0 or 1",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if let Some(j) = (0..matrix.cols()).find(|&j| matrix.column(j).iter().all(|&v| v == 0.0)) {
            return Err(RotationError::InvalidTarget(format!(
                "column {} has no salient position",
                j + 1
            )));
        }
        Ok(Self { matrix })
    }

    /// Independent-clusters target `I_q ⊗ 1_{p/q}`: consecutive blocks of
    /// `p/q` variables load on factors `1..q` in order.
    pub fn icm(p: usize, q: usize) -> Result<Self, RotationError> {
        if q == 0 || p == 0 || !p.is_multiple_of(q) {
            return Err(RotationError::InvalidTarget(format!(
                "cannot build a block target: {q} factors do not divide {p} variables"
            )));
        }
        let block = Matrix::filled(p / q, 1, 1.0);
        Self::new(Matrix::identity(q).kronecker(&block))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn variables(&self) -> usize {
        self.matrix.rows()
    }

    pub fn factors(&self) -> usize {
        self.matrix.cols()
    }

    /// True when every variable is salient on at most one factor.
    pub fn is_independent_clusters(&self) -> bool {
        (0..self.matrix.rows()).all(|i| self.matrix.row(i).iter().filter(|&&v| v != 0.0).count() <= 1)
    }
}

/// Free-function form of [`TargetSpec::icm`].
pub fn build_icm_target(p: usize, q: usize) -> Result<TargetSpec, RotationError> {
    TargetSpec::icm(p, q)
}
