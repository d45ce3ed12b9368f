//! Built-in 18 x 3 population example: three blocks of six variables with
//! salient loadings of .50 and cross-loadings of ±.20 that cancel within each
//! block. Mean-target rotation leaves it untouched; plain target rotation
//! introduces negative factor correlations.

use crate::linalg::Matrix;
use crate::rotation::{build_icm_target, TargetSpec};

pub const EXAMPLE_VARIABLES: usize = 18;
pub const EXAMPLE_FACTORS: usize = 3;

/// Initial orthogonal loadings of the population example.
pub fn table1_loadings() -> Matrix {
    const ROWS: [[f64; 3]; 18] = [
        [0.50, 0.20, -0.20],
        [0.50, -0.20, 0.20],
        [0.50, 0.20, -0.20],
        [0.50, -0.20, 0.20],
        [0.50, 0.20, -0.20],
        [0.50, -0.20, 0.20],
        [0.20, 0.50, -0.20],
        [-0.20, 0.50, 0.20],
        [0.20, 0.50, -0.20],
        [-0.20, 0.50, 0.20],
        [0.20, 0.50, -0.20],
        [-0.20, 0.50, 0.20],
        [0.20, -0.20, 0.50],
        [-0.20, 0.20, 0.50],
        [0.20, -0.20, 0.50],
        [-0.20, 0.20, 0.50],
        [0.20, -0.20, 0.50],
        [-0.20, 0.20, 0.50],
    ];
    Matrix::from_rows(&ROWS).expect("static example is well formed")
}

/// Block target matching [`table1_loadings`].
pub fn table1_target() -> TargetSpec {
    build_icm_target(EXAMPLE_VARIABLES, EXAMPLE_FACTORS).expect("18 is divisible by 3")
}
