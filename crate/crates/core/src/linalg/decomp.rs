use super::{dot, LinalgError, Matrix, SINGULAR_PIVOT};

/// Eigendecomposition of a symmetric matrix: `a · vectors = vectors · diag(values)`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, in the order of `values`.
    pub vectors: Matrix,
}

/// Thin singular value decomposition `a = u · diag(s) · vᵀ`.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: Matrix,
    /// Singular values, descending and non-negative.
    pub s: Vec<f64>,
    pub v: Matrix,
}

const MAX_JACOBI_SWEEPS: usize = 80;

impl Matrix {
    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// Fails when a pivot falls below `1e-12 · max|a_ij|`.
    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        self.require_square("inverse")?;
        let n = self.rows;
        let threshold = SINGULAR_PIVOT * self.max_abs();
        if threshold == 0.0 {
            return Err(LinalgError::Singular { op: "inverse" });
        }
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n).data;
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold((col, -1.0), |best, cand| if cand.1 > best.1 { cand } else { best });
            if pivot_abs < threshold {
                return Err(LinalgError::Singular { op: "inverse" });
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                    inv.swap(col * n + j, pivot_row * n + j);
                }
            }
            let pivot = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= pivot;
                inv[col * n + j] /= pivot;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= factor * a[col * n + j];
                    inv[r * n + j] -= factor * inv[col * n + j];
                }
            }
        }
        let out = Matrix::from_vec_unchecked(n, n, inv);
        if !out.is_finite() {
            return Err(LinalgError::Singular { op: "inverse" });
        }
        Ok(out)
    }

    /// Lower Cholesky factor `l` with `l · lᵀ = self`.
    ///
    /// Doubles as the positive-definiteness test: a pivot at or below
    /// `1e-12 · max diag` is rejected.
    pub fn cholesky_lower(&self) -> Result<Matrix, LinalgError> {
        self.require_symmetric("cholesky")?;
        let n = self.rows;
        let scale = self.diagonal().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let floor = SINGULAR_PIVOT * scale.max(f64::MIN_POSITIVE);
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > floor) {
                return Err(LinalgError::NotPositiveDefinite { index: j, pivot: d });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Matrix::from_vec_unchecked(n, n, l))
    }

    /// Symmetric eigendecomposition via Householder tridiagonalisation and
    /// implicit QL iterations.
    pub fn sym_eigen(&self) -> Result<SymEigen, LinalgError> {
        self.require_symmetric("sym_eigen")?;
        let n = self.rows;
        // Work on the exactly symmetric part so rounding asymmetry cannot leak in.
        let mut v = self.symmetrize()?.data;
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        tridiagonalize(n, &mut v, &mut d, &mut e);
        tridiagonal_ql(n, &mut v, &mut d, &mut e)?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
        let values = order.iter().map(|&k| d[k]).collect();
        let vectors = Matrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
        Ok(SymEigen { values, vectors })
    }

    /// Thin SVD by one-sided (Hestenes) Jacobi rotations.
    ///
    /// For an `m x n` input, `u` is `m x k`, `v` is `n x k` with `k = min(m, n)`.
    pub fn svd_thin(&self) -> Result<ThinSvd, LinalgError> {
        if self.rows < self.cols {
            let t = self.transpose().svd_thin()?;
            return Ok(ThinSvd {
                u: t.v,
                s: t.s,
                v: t.u,
            });
        }
        let (m, n) = self.shape();
        let mut cols: Vec<Vec<f64>> = (0..n).map(|j| self.column(j)).collect();
        let mut vcols: Vec<Vec<f64>> = (0..n)
            .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();

        let mut converged = false;
        for _ in 0..MAX_JACOBI_SWEEPS {
            let mut rotated = false;
            for i in 0..n {
                for j in (i + 1)..n {
                    let alpha = dot(&cols[i], &cols[i]);
                    let beta = dot(&cols[j], &cols[j]);
                    let gamma = dot(&cols[i], &cols[j]);
                    if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    rotate_pair(&mut cols, i, j, c, s);
                    rotate_pair(&mut vcols, i, j, c, s);
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(LinalgError::NoConvergence {
                op: "svd_thin",
                iterations: MAX_JACOBI_SWEEPS,
            });
        }

        let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
        let s_max = norms[order[0]];
        let tiny = f64::EPSILON * m as f64 * s_max;

        let mut ucols: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut s = Vec::with_capacity(n);
        let mut deficient = Vec::new();
        for (pos, &k) in order.iter().enumerate() {
            if norms[k] > tiny && norms[k] > 0.0 {
                ucols.push(cols[k].iter().map(|x| x / norms[k]).collect());
                s.push(norms[k]);
            } else {
                ucols.push(vec![0.0; m]);
                s.push(0.0);
                deficient.push(pos);
            }
        }
        complete_orthonormal(&mut ucols, &deficient);

        let u = Matrix::from_fn(m, n, |i, j| ucols[j][i]);
        let v = Matrix::from_fn(n, n, |i, j| vcols[order[j]][i]);
        Ok(ThinSvd { u, s, v })
    }

    /// `max|λ| / min|λ|` over the eigenvalues of a symmetric matrix;
    /// `+inf` when the smallest is exactly zero.
    pub fn condition_number(&self) -> Result<f64, LinalgError> {
        let eig = self.sym_eigen()?;
        let (lo, hi) = eig
            .values
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| (lo.min(v.abs()), hi.max(v.abs())));
        if lo == 0.0 {
            Ok(f64::INFINITY)
        } else {
            Ok(hi / lo)
        }
    }
}

fn rotate_pair(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(j);
    for (a, b) in left[i].iter_mut().zip(right[0].iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Fills the listed columns with unit vectors orthogonal to all other columns.
fn complete_orthonormal(cols: &mut [Vec<f64>], missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let m = cols[0].len();
    let mut candidate = 0;
    for &slot in missing {
        while candidate < m {
            let mut w = vec![0.0; m];
            w[candidate] = 1.0;
            candidate += 1;
            // Two passes of Gram-Schmidt for stability.
            for _ in 0..2 {
                for (k, c) in cols.iter().enumerate() {
                    if k == slot || c.iter().all(|&x| x == 0.0) {
                        continue;
                    }
                    let proj = dot(&w, c);
                    for (wi, ci) in w.iter_mut().zip(c) {
                        *wi -= proj * ci;
                    }
                }
            }
            let norm = dot(&w, &w).sqrt();
            if norm > 1e-8 {
                cols[slot] = w.iter().map(|x| x / norm).collect();
                break;
            }
        }
    }
}

/// Householder reduction to tridiagonal form (EISPACK tred2). On return `v`
/// holds the accumulated orthogonal transform, `d` the diagonal and `e` the
/// sub-diagonal in `e[1..]`.
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iterations on the tridiagonal matrix (EISPACK tql2).
fn tridiagonal_ql(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<(), LinalgError> {
    let idx = |i: usize, j: usize| i * n + j;
    let max_iter = 30 * n.max(1);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(LinalgError::NoConvergence {
                        op: "sym_eigen",
                        iterations: max_iter,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[idx(k, i + 1)];
                        v[idx(k, i + 1)] = s * v[idx(k, i)] + c * h;
                        v[idx(k, i)] = c * v[idx(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{lcg_matrix, lcg_spd, lcg_symmetric};

    fn reconstruct_eigen(e: &SymEigen) -> Matrix {
        e.vectors
            .scale_cols(&e.values)
            .matmul(&e.vectors.transpose())
            .unwrap()
    }

    fn orthonormality_error(q: &Matrix) -> f64 {
        q.tmatmul(q).unwrap().max_abs_diff(&Matrix::identity(q.cols()))
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Matrix::identity(4).inverse().unwrap(), Matrix::identity(4));
        let inv = Matrix::from_diag(&[2.0, 4.0]).inverse().unwrap();
        assert_eq!(inv, Matrix::from_diag(&[0.5, 0.25]));
        for seed in 0..10 {
            let a = lcg_spd(6, seed).add(&lcg_matrix(6, 6, seed + 50)).unwrap();
            let inv = a.inverse().unwrap();
            let eye = Matrix::identity(6);
            assert!(a.matmul(&inv).unwrap().max_abs_diff(&eye) < 1e-10);
            assert!(inv.matmul(&a).unwrap().max_abs_diff(&eye) < 1e-10);
        }
    }

    #[test]
    fn inverse_rejects_singular() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert_eq!(a.inverse(), Err(LinalgError::Singular { op: "inverse" }));
        assert!(Matrix::zeros(3, 3).inverse().is_err());
        let nearly = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0 + 1e-14]]).unwrap();
        assert!(nearly.inverse().is_err());
        assert!(matches!(
            Matrix::zeros(2, 3).inverse(),
            Err(LinalgError::NotSquare { .. })
        ));
    }

    #[test]
    fn eigen_examples() {
        let e = Matrix::from_diag(&[3.0, 1.0]).sym_eigen().unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert!(e.vectors.map(f64::abs).max_abs_diff(&Matrix::identity(2)) < 1e-15);

        let e = Matrix::identity(5).sym_eigen().unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));

        let unsorted = Matrix::from_diag(&[1.0, 5.0, -2.0, 3.0]).sym_eigen().unwrap();
        assert_eq!(unsorted.values, vec![5.0, 3.0, 1.0, -2.0]);
    }

    #[test]
    fn eigen_reconstructs_random_symmetric() {
        for (n, seed) in [(1, 1), (2, 2), (8, 3), (8, 4), (25, 5), (60, 6)] {
            let a = lcg_symmetric(n, seed);
            let e = a.sym_eigen().unwrap();
            assert!(reconstruct_eigen(&e).max_abs_diff(&a) < 1e-8, "n = {n}");
            assert!(orthonormality_error(&e.vectors) < 1e-8);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            let av = a.matmul(&e.vectors).unwrap();
            assert!(av.max_abs_diff(&e.vectors.scale_cols(&e.values)) < 1e-8);
        }
    }

    #[test]
    fn eigen_rejects_non_symmetric() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(a.sym_eigen(), Err(LinalgError::NotSymmetric { .. })));
    }

    #[test]
    fn eigen_handles_repeated_values() {
        let a = Matrix::filled(6, 6, 0.5).add_diag(0.5);
        let e = a.sym_eigen().unwrap();
        assert!((e.values[0] - 3.5).abs() < 1e-12);
        assert!(e.values[1..].iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!(reconstruct_eigen(&e).max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn svd_examples() {
        let svd = Matrix::from_diag(&[2.0, 1.0]).svd_thin().unwrap();
        assert_eq!(svd.s, vec![2.0, 1.0]);
        let svd = Matrix::from_diag(&[1.0, 2.0]).svd_thin().unwrap();
        assert_eq!(svd.s, vec![2.0, 1.0]);
    }

    #[test]
    fn svd_reconstructs_and_matches_eigen() {
        for (r, c, seed) in [(10, 3, 1), (3, 10, 2), (7, 7, 3), (60, 12, 4), (60, 60, 5)] {
            let a = lcg_matrix(r, c, seed);
            let svd = a.svd_thin().unwrap();
            let back = svd.u.scale_cols(&svd.s).matmul(&svd.v.transpose()).unwrap();
            assert!(back.max_abs_diff(&a) < 1e-8, "{r}x{c}");
            assert!(orthonormality_error(&svd.u) < 1e-8);
            assert!(orthonormality_error(&svd.v) < 1e-8);
            let gram = a.tmatmul(&a).unwrap();
            let eig = gram.sym_eigen().unwrap();
            for (k, s) in svd.s.iter().enumerate() {
                assert!((s - eig.values[k].max(0.0).sqrt()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn svd_of_rank_deficient_input_keeps_orthonormal_u() {
        let col = lcg_matrix(6, 1, 8);
        let a = col.matmul(&Matrix::from_rows(&[[1.0, 2.0, -1.0]]).unwrap()).unwrap();
        let svd = a.svd_thin().unwrap();
        assert!(svd.s[1] < 1e-12 && svd.s[2] < 1e-12);
        assert!(orthonormality_error(&svd.u) < 1e-8);
        let back = svd.u.scale_cols(&svd.s).matmul(&svd.v.transpose()).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-8);
    }

    #[test]
    fn cholesky_examples() {
        assert_eq!(Matrix::identity(3).cholesky_lower().unwrap(), Matrix::identity(3));
        let a = Matrix::from_rows(&[[4.0, 2.0], [2.0, 2.0]]).unwrap();
        let l = a.cholesky_lower().unwrap();
        assert_eq!(l, Matrix::from_rows(&[[2.0, 0.0], [1.0, 1.0]]).unwrap());
        let spd = lcg_spd(9, 3);
        let l = spd.cholesky_lower().unwrap();
        assert!(l.matmul(&l.transpose()).unwrap().max_abs_diff(&spd) < 1e-8);
        let indefinite = Matrix::from_diag(&[1.0, -1.0]);
        assert!(matches!(
            indefinite.cholesky_lower(),
            Err(LinalgError::NotPositiveDefinite { index: 1, .. })
        ));
    }

    #[test]
    fn cholesky_agrees_with_eigen_positivity() {
        for seed in 0..100 {
            let a = lcg_symmetric(5, seed).add_diag(0.9);
            let all_positive = a.sym_eigen().unwrap().values.iter().all(|&v| v > 0.0);
            assert_eq!(a.cholesky_lower().is_ok(), all_positive, "seed {seed}");
        }
    }

    #[test]
    fn condition_number_examples() {
        assert_eq!(Matrix::identity(3).condition_number().unwrap(), 1.0);
        assert_eq!(Matrix::identity(3).scale(0.25).condition_number().unwrap(), 1.0);
        assert_eq!(Matrix::from_diag(&[4.0, 1.0]).condition_number().unwrap(), 4.0);
        assert_eq!(
            Matrix::from_diag(&[4.0, 0.0]).condition_number().unwrap(),
            f64::INFINITY
        );
    }
}
