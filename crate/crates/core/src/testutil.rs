//! Deterministic fixtures shared by unit tests.

use crate::linalg::Matrix;

/// Uniform(-1, 1) fill from a 64-bit LCG; independent of the simulation RNG.
pub(crate) fn lcg_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    Matrix::from_fn(rows, cols, |_, _| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    })
}

/// Random symmetric matrix `(A + Aᵀ)/2`.
pub(crate) fn lcg_symmetric(n: usize, seed: u64) -> Matrix {
    lcg_matrix(n, n, seed).symmetrize().unwrap()
}

/// Random symmetric positive-definite matrix `AᵀA + n·I`.
pub(crate) fn lcg_spd(n: usize, seed: u64) -> Matrix {
    let a = lcg_matrix(n, n, seed);
    a.tmatmul(&a).unwrap().add_diag(n as f64)
}
