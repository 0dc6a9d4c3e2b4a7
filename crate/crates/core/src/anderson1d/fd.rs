//! Finite-difference oracle: the Dirichlet operator -d^2/dx^2 + B' on [0, L]
//! as a symmetric tridiagonal matrix, with B' read as increment quotients.

use crate::anderson1d::BrownianPath;
use crate::error::CoreError;
use crate::linalg::tridiagonal_smallest;
use crate::Result;

/// Lowest `n` eigenvalues on an `m_grid`-cell grid. The path must refine the
/// FD grid (its step count a multiple of `m_grid`); the potential at node i
/// is (B(x_{i+1}) - B(x_i)) / h over the FD cell.
pub fn fd_diagonalize(path: &BrownianPath, m_grid: usize, n: usize) -> Result<Vec<f64>> {
    if m_grid < 64 {
        return Err(CoreError::InvalidArgument(format!(
            "FD grid {m_grid} below the minimum 64"
        )));
    }
    if n == 0 || n > m_grid - 1 {
        return Err(CoreError::InvalidArgument(format!(
            "eigenvalue count {n} outside 1..={}",
            m_grid - 1
        )));
    }
    if path.steps() % m_grid != 0 {
        return Err(CoreError::InvalidArgument(format!(
            "path steps {} not a multiple of FD grid {m_grid}",
            path.steps()
        )));
    }
    let stride = path.steps() / m_grid;
    let h = path.len() / m_grid as f64;
    let inv_h2 = 1.0 / (h * h);
    let b = path.values();
    // interior nodes x_1 .. x_{m-1}
    let diag: Vec<f64> = (1..m_grid)
        .map(|i| 2.0 * inv_h2 + (b[(i + 1) * stride] - b[i * stride]) / h)
        .collect();
    let off = vec![-inv_h2; m_grid - 2];
    let vmax = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    Ok(tridiagonal_smallest(&diag, &off, n, 1e-12 * vmax.max(1.0)))
}
