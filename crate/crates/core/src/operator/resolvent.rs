//! The resolvent G_a = (H + a)^{-1} by fixed-point iteration.
//!
//! Solving (H + a) f = g rearranges to f = -sigma_a(D)(g - V f), a
//! contraction once `a` dominates the potential. Divergence is detected from
//! the update-ratio trend and reported with a doubled-shift suggestion, which
//! `resolve_auto` applies on the caller's behalf.

use crate::error::CoreError;
use crate::field::{apply_multiplier, Field, MultiplierSpec};
use crate::operator::HamiltonianOp;
use crate::Result;

const MAX_ITER: usize = 3000;
/// Update ratios above this for several consecutive steps abort early.
const DIVERGE_RATIO: f64 = 1.02;
const DIVERGE_STREAK: usize = 5;
/// Honest-residual allowance over the requested tolerance.
const RESID_SLACK: f64 = 10.0;

#[derive(Debug)]
pub struct ResolventSolve {
    pub field: Field<f64>,
    /// Shift actually used; differs from the request only via resolve_auto.
    pub a: f64,
    pub iterations: usize,
    /// ||(H + a) f - g|| / ||g||, recomputed after the iteration stopped.
    pub residual: f64,
}

/// Solve (H + a) f = g to relative residual `tol`.
pub fn resolvent_fixed_point(
    op: &mut HamiltonianOp,
    g: &Field<f64>,
    a: f64,
    tol: f64,
) -> Result<ResolventSolve> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(CoreError::InvalidArgument(format!("resolvent shift a = {a} must be positive")));
    }
    if !(tol > 0.0) {
        return Err(CoreError::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let g_norm = g.l2_norm();
    if g_norm == 0.0 {
        return Err(CoreError::ZeroField { context: "resolvent right-hand side" });
    }
    let sigma_a = MultiplierSpec::sigma_a(a);
    let mut f = Field::zeros(g.grid(), "resolvent iterate");
    let mut prev_delta = f64::INFINITY;
    let mut ratio = 0.0f64;
    let mut streak = 0usize;
    let blowup = 1e8 * (g_norm / a + 1.0);
    let mut iterations = 0usize;
    let mut settled = false;

    while iterations < MAX_ITER {
        iterations += 1;
        let mut rhs = op.potential_product(&f)?;
        rhs.axpy(-1.0, g)?;
        let next = apply_multiplier(&sigma_a, &rhs)?;
        let mut step = next.clone();
        step.axpy(-1.0, &f)?;
        let delta = step.l2_norm();
        f = next;
        let f_norm = f.l2_norm();
        if !delta.is_finite() || !f_norm.is_finite() || f_norm > blowup {
            return Err(CoreError::ContractionFailure { a, ratio, suggested: 2.0 * a });
        }
        ratio = if prev_delta > 0.0 && prev_delta.is_finite() { delta / prev_delta } else { 0.0 };
        streak = if ratio >= DIVERGE_RATIO { streak + 1 } else { 0 };
        if streak >= DIVERGE_STREAK {
            return Err(CoreError::ContractionFailure { a, ratio, suggested: 2.0 * a });
        }
        prev_delta = delta;
        // fixed-point error is about delta / (1 - ratio)
        let margin = (1.0 - ratio.min(0.98)) * 0.25;
        if delta <= tol * margin * f_norm.max(g_norm / a) {
            settled = true;
            break;
        }
    }

    let residual = relative_residual(op, &f, g, a, g_norm)?;
    let allowed = RESID_SLACK * tol;
    if residual > allowed {
        if settled {
            return Err(CoreError::ResolventResidual { a, residual, allowed, iterations });
        }
        // hit the iteration cap while still moving: a contraction problem,
        // not an accuracy problem
        return Err(CoreError::ContractionFailure { a, ratio, suggested: 2.0 * a });
    }
    Ok(ResolventSolve { field: f, a, iterations, residual })
}

/// Solve (H + a) f = g, doubling `a` on contraction failure until the
/// iteration converges. The shift that worked is reported in the result.
pub fn resolve_auto(
    op: &mut HamiltonianOp,
    g: &Field<f64>,
    a0: f64,
    tol: f64,
) -> Result<ResolventSolve> {
    let mut a = a0;
    for _ in 0..12 {
        match resolvent_fixed_point(op, g, a, tol) {
            Err(CoreError::ContractionFailure { suggested, .. }) => a = suggested,
            other => return other,
        }
    }
    resolvent_fixed_point(op, g, a, tol)
}

/// Largest eigenvalue of G_a by power iteration, each step one resolvent
/// solve. Equals 1/(lambda_min(H) + a) when a exceeds -lambda_min(H).
pub fn resolvent_lambda_max(
    op: &mut HamiltonianOp,
    a: f64,
    tol: f64,
    seed: u64,
) -> Result<f64> {
    let grid = op.grid();
    let coeffs = crate::rng::mode_gaussians(grid, seed);
    let mut v = Field::from_coeffs(grid, coeffs, "power iterate")?;
    v.scale(1.0 / v.l2_norm());
    let mut lambda = 0.0f64;
    for _ in 0..500 {
        let solve = resolvent_fixed_point(op, &v, a, tol)?;
        let gv = solve.field;
        let next_lambda = gv.l2_inner(&v)?;
        let norm = gv.l2_norm();
        if norm == 0.0 {
            return Err(CoreError::ZeroField { context: "power iteration collapsed" });
        }
        let mut next = gv;
        next.scale(1.0 / norm);
        let moved = (next_lambda - lambda).abs();
        lambda = next_lambda;
        v = next;
        if moved <= 1e-9 * lambda.abs().max(1e-300) {
            return Ok(lambda);
        }
    }
    Ok(lambda)
}

fn relative_residual(
    op: &mut HamiltonianOp,
    f: &Field<f64>,
    g: &Field<f64>,
    a: f64,
    g_norm: f64,
) -> Result<f64> {
    let mut r = op.apply(f)?;
    r.axpy(a, f)?;
    r.axpy(-1.0, g)?;
    Ok(r.l2_norm() / g_norm)
}
