//! Lanczos with full reorthogonalization and deflation restarts.
//!
//! One Krylov run from a random start sees each distinct eigenvalue once, so
//! multiplicity is recovered by locking converged pairs and restarting in
//! their orthogonal complement until a run finds nothing new below the k-th
//! locked value. That final empty run doubles as the completeness check.

use crate::error::CoreError;
use crate::field::{Field, TorusGrid};
use crate::linalg::tridiagonal_eigen;
use crate::operator::HamiltonianOp;
use crate::rng::mode_gaussians;
use crate::Result;

/// Residual bound target relative to the spectral radius estimate.
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

const MAX_M: usize = 460;
const CHECK_EVERY: usize = 20;
/// Honest-residual slack over the tridiagonal bound level.
const RESID_SLACK: f64 = 10.0;
/// Eigenvalues closer than this (relative to scale) are one multiplet.
const CLUSTER_REL: f64 = 1e-7;

#[derive(Debug)]
pub struct SpectrumResult {
    /// Ascending, counted with multiplicity, shift included.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal, matching order.
    pub eigenvectors: Vec<Field<f64>>,
    /// Recomputed ||H v - lambda v|| per pair, not the tridiagonal bound.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub restarts: usize,
}

pub(crate) struct KrylovOutcome {
    pub ritz_values: Vec<f64>,
    pub ritz_vectors: Vec<Field<f64>>,
    pub bounds: Vec<f64>,
    pub iterations: usize,
    pub scale: f64,
}

/// Two classical Gram-Schmidt passes of `w` against an orthonormal set.
pub(crate) fn orthogonalize_twice(w: &mut Field<f64>, basis: &[&Field<f64>]) -> Result<()> {
    for _ in 0..2 {
        for b in basis {
            let c = w.l2_inner(b)?;
            w.axpy(-c, b)?;
        }
    }
    Ok(())
}

/// Deterministic random start vector orthogonal to `locked`, unit norm.
pub(crate) fn random_start(
    grid: TorusGrid,
    seed: u64,
    locked: &[&Field<f64>],
) -> Result<Field<f64>> {
    for attempt in 0u64..8 {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let coeffs = mode_gaussians(grid, s);
        let mut v = Field::from_coeffs(grid, coeffs, "lanczos start")?;
        let before = v.l2_norm();
        orthogonalize_twice(&mut v, locked)?;
        let after = v.l2_norm();
        if after > 1e-8 * before {
            v.scale(1.0 / after);
            return Ok(v);
        }
    }
    Err(CoreError::InvalidArgument(
        "could not draw a start vector outside the locked subspace".into(),
    ))
}

/// One Lanczos run for the lowest `want` Ritz pairs of `apply` restricted to
/// the orthogonal complement of `locked`. Returned pairs are ascending with
/// their tridiagonal residual bounds; the caller decides what is converged.
pub(crate) fn krylov_lowest(
    mut apply: impl FnMut(&Field<f64>) -> Result<Field<f64>>,
    start: Field<f64>,
    locked: &[&Field<f64>],
    want: usize,
    tol: f64,
    max_m: usize,
    check_every: usize,
) -> Result<KrylovOutcome> {
    let mut basis: Vec<Field<f64>> = vec![start];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut scale = 0.0f64;
    // the off-diagonal that never joins betas: it bounds the Ritz residuals
    let mut last_beta = 0.0f64;

    let mut finished = false;
    while !finished {
        let j = alphas.len();
        let vj = &basis[j];
        let mut w = apply(vj)?;
        let alpha = w.l2_inner(vj)?;
        alphas.push(alpha);
        {
            let refs: Vec<&Field<f64>> = basis.iter().collect();
            orthogonalize_twice(&mut w, &refs)?;
        }
        orthogonalize_twice(&mut w, locked)?;
        let beta = w.l2_norm();
        last_beta = beta;
        scale = scale.max(alpha.abs()).max(beta);

        let breakdown = beta <= 1e-13 * scale.max(1e-300);
        let at_cap = j + 1 >= max_m;
        let checkpoint = (j + 1) % check_every == 0;
        if breakdown || at_cap {
            finished = true;
        } else if checkpoint {
            let (theta, svecs) = tridiagonal_eigen(&alphas, &betas);
            let sc = theta.iter().fold(0.0f64, |m, t| m.max(t.abs())).max(1e-300);
            let m = alphas.len();
            let take = want.min(m);
            let worst = (0..take)
                .map(|i| beta * svecs[i][m - 1].abs())
                .fold(0.0f64, f64::max);
            if worst <= tol * sc {
                finished = true;
            }
        }
        if !finished {
            betas.push(beta);
            w.scale(1.0 / beta);
            basis.push(w);
        }
    }

    let m = alphas.len();
    let (theta, svecs) = tridiagonal_eigen(&alphas, &betas);
    let sc = theta.iter().fold(0.0f64, |acc, t| acc.max(t.abs())).max(1e-300);
    let take = want.min(m);
    let mut values = Vec::with_capacity(take);
    let mut vectors = Vec::with_capacity(take);
    let mut bounds = Vec::with_capacity(take);
    for i in 0..take {
        values.push(theta[i]);
        bounds.push(last_beta * svecs[i][m - 1].abs());
        let mut y = Field::zeros(basis[0].grid(), "ritz vector");
        for (j, v) in basis.iter().take(m).enumerate() {
            y.axpy(svecs[i][j], v)?;
        }
        let n = y.l2_norm();
        if n > 0.0 {
            y.scale(1.0 / n);
        }
        vectors.push(y);
    }
    Ok(KrylovOutcome {
        ritz_values: values,
        ritz_vectors: vectors,
        bounds,
        iterations: m,
        scale: sc,
    })
}

/// The `k` lowest eigenpairs of H, counted with multiplicity.
///
/// The constant shift is peeled off before iterating and re-added to the
/// eigenvalues afterwards, so shifting the operator shifts the spectrum by
/// exactly that floating-point constant and changes nothing else.
pub fn lowest_eigenpairs(
    op: &mut HamiltonianOp,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<SpectrumResult> {
    if k == 0 {
        return Err(CoreError::InvalidArgument("requested 0 eigenpairs".into()));
    }
    let free = (0..op.grid().modes()).filter(|&f| !op.grid().is_nyquist(f)).count();
    if k > free {
        return Err(CoreError::InvalidArgument(format!(
            "requested {k} eigenpairs of a rank-{free} discretization"
        )));
    }
    if !(tol > 0.0) {
        return Err(CoreError::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let shift = op.shift();
    op.set_shift(0.0);
    let result = lowest_eigenpairs_unshifted(op, k, tol, seed);
    op.set_shift(shift);
    let mut out = result?;
    for v in &mut out.eigenvalues {
        *v += shift;
    }
    Ok(out)
}

fn lowest_eigenpairs_unshifted(
    op: &mut HamiltonianOp,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<SpectrumResult> {
    let grid = op.grid();
    let mut pool: Vec<(f64, Field<f64>, f64)> = Vec::new();
    let mut iterations = 0usize;
    let mut restarts = 0usize;
    let mut stalls = 0usize;
    let max_restarts = 2 * k + 6;

    loop {
        let locked: Vec<&Field<f64>> = pool.iter().map(|(_, v, _)| v).collect();
        let start = random_start(grid, seed.wrapping_add(restarts as u64), &locked)?;
        let want = (k - pool.len().min(k)).max(1);
        let out =
            krylov_lowest(|f| op.apply(f), start, &locked, want, tol, MAX_M, CHECK_EVERY)?;
        iterations += out.iterations;
        let cluster = CLUSTER_REL * out.scale;
        // anything at or above the k-th locked value (cluster-resolved) can
        // no longer change the answer; sorted insertion keeps pool ascending
        let cutoff = if pool.len() >= k { pool[k - 1].0 - cluster } else { f64::INFINITY };

        let mut fresh: Vec<(f64, Field<f64>, f64)> = Vec::new();
        for (i, theta) in out.ritz_values.iter().enumerate() {
            if *theta >= cutoff {
                break;
            }
            if out.bounds[i] > tol * out.scale {
                break;
            }
            let mut y = out.ritz_vectors[i].clone();
            // deflation hygiene: the run kept y orthogonal to locked pairs,
            // one more pass removes accumulated dust before the pool grows
            orthogonalize_twice(&mut y, &locked)?;
            let n = y.l2_norm();
            if n < 0.5 {
                continue;
            }
            y.scale(1.0 / n);
            let mut hy = op.apply(&y)?;
            let theta_refined = hy.l2_inner(&y)?;
            hy.axpy(-theta_refined, &y)?;
            let resid = hy.l2_norm();
            if resid > RESID_SLACK * tol * out.scale {
                break;
            }
            fresh.push((theta_refined, y, resid));
        }
        drop(locked);
        let newly = fresh.len();
        for entry in fresh {
            let at = pool.partition_point(|(t, _, _)| *t <= entry.0);
            pool.insert(at, entry);
        }

        if pool.len() >= k && newly == 0 {
            break;
        }
        if newly == 0 {
            stalls += 1;
            if stalls >= 2 {
                return Err(nonconvergence(k, &pool, tol, restarts, &out.bounds));
            }
        } else {
            stalls = 0;
        }
        restarts += 1;
        if restarts > max_restarts {
            return Err(nonconvergence(k, &pool, tol, restarts, &out.bounds));
        }
    }

    pool.truncate(k);
    // re-orthonormalize inside multiplets; copies were locked in different
    // runs and are orthogonal only to working precision
    let scale = pool.iter().fold(0.0f64, |m, (t, _, _)| m.max(t.abs())).max(1e-300);
    let mut i = 0;
    while i < pool.len() {
        let mut j = i + 1;
        while j < pool.len() && (pool[j].0 - pool[i].0).abs() <= CLUSTER_REL * scale {
            j += 1;
        }
        for a in i..j {
            let (head, tail) = pool.split_at_mut(a);
            let group: Vec<&Field<f64>> = head[i..].iter().map(|(_, v, _)| v).collect();
            let (theta, v, resid) = &mut tail[0];
            orthogonalize_twice(v, &group)?;
            let n = v.l2_norm();
            v.scale(1.0 / n);
            let mut hv = op.apply(v)?;
            *theta = hv.l2_inner(v)?;
            hv.axpy(-*theta, v)?;
            *resid = hv.l2_norm();
        }
        pool[i..j].sort_by(|a, b| a.0.total_cmp(&b.0));
        i = j;
    }

    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (t, v, r) in pool {
        eigenvalues.push(t);
        eigenvectors.push(v);
        residuals.push(r);
    }
    Ok(SpectrumResult { eigenvalues, eigenvectors, residuals, iterations, restarts })
}

fn nonconvergence(
    k: usize,
    pool: &[(f64, Field<f64>, f64)],
    tol: f64,
    restarts: usize,
    bounds: &[f64],
) -> CoreError {
    CoreError::EigensolverNonConvergence {
        requested: k,
        converged: pool.len(),
        tol,
        restarts,
        best_residuals: bounds.to_vec(),
    }
}
