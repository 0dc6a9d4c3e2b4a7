//! Small dense/tridiagonal eigensolver helpers.
//!
//! Dense symmetric problems (Lanczos tridiagonal matrices, oracle matrices)
//! go through nalgebra; large finite-difference tridiagonals use Sturm
//! bisection, which never forms a dense matrix.

use nalgebra::{DMatrix, SymmetricEigen};

/// Eigen-decomposition of a dense symmetric matrix, eigenvalues ascending,
/// eigenvectors as rows of the second component (orthonormal).
pub fn dense_symmetric_eigen(mat: DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = mat.nrows();
    assert_eq!(n, mat.ncols(), "matrix must be square, got {}x{}", n, mat.ncols());
    let eig = SymmetricEigen::new(mat);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// Eigen-decomposition of a symmetric tridiagonal matrix given by its
/// diagonal and off-diagonal, eigenvalues ascending, eigenvectors as rows.
/// Sized for Lanczos matrices (a few hundred at most), so densifying is fine.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = diag.len();
    assert_eq!(off.len() + 1, m, "off-diagonal length {} for size {}", off.len(), m);
    let mut mat = DMatrix::zeros(m, m);
    for i in 0..m {
        mat[(i, i)] = diag[i];
        if i + 1 < m {
            mat[(i, i + 1)] = off[i];
            mat[(i + 1, i)] = off[i];
        }
    }
    dense_symmetric_eigen(mat)
}

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) strictly
/// below `x`, by the Sturm/LDL sign-change count.
pub fn sturm_count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0usize;
    let mut d = 1.0f64;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - b2 / d;
        if d == 0.0 {
            // nudge off the exact-singularity case; direction is irrelevant
            // for the count's one-sided limit
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest `k` eigenvalues of a symmetric tridiagonal by Sturm bisection,
/// each bracketed to absolute width <= tol.
pub fn tridiagonal_smallest(diag: &[f64], off: &[f64], k: usize, tol: f64) -> Vec<f64> {
    assert!(k <= diag.len(), "asked for {k} of {}", diag.len());
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..diag.len() {
        let mut r = 0.0;
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i < off.len() {
            r += off[i].abs();
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (1..=k)
        .map(|idx| {
            let (mut a, mut b) = (lo, hi);
            while b - a > tol {
                let mid = 0.5 * (a + b);
                if sturm_count_below(diag, off, mid) >= idx {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}
