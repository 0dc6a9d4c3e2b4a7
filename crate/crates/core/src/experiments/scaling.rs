//! Eigenvalue rescaling between torus sizes: the deterministic smooth-potential
//! identity, the exact lattice constant m_{r,L}, and the distributional
//! two-box comparison (equality in law, so only moments are compared).

use std::time::Instant;

use crate::error::CoreError;
use num_complex::Complex;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::records::ExperimentRecord;
use crate::experiments::solve::{solve_lowest, NOISY_SHIFT};
use crate::field::{Field, TorusGrid, Transformer};
use crate::noise::{enhance, mollify, renorm_constant, sample_white_noise, MollifierSpec};
use crate::operator::HamiltonianOp;
use crate::stats::{derive_seed, mean_and_variance};
use crate::Result;

/// m_{r,L} = (1-r^2)/L^2 * sum over n in Z^2 of
/// 1 / ((1 + |omega_n|^2)(1 + r^2 |omega_n|^2)), omega_n = 2 pi n / L,
/// truncated to |n_i| <= radius and compensated (Kahan). The truncation tail
/// is O(L^2 / (r^2 radius^2)) in absolute terms; radius 1024 leaves ~6e-9
/// at r = 1/2, L = 1.
pub fn m_r_l(r: f64, l: f64, radius: i64) -> Result<f64> {
    check_m_arguments(r, l, radius)?;
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for nx in -radius..=radius {
        for ny in -radius..=radius {
            let y = m_term(r, l, nx, ny) - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
    }
    Ok(acc * (1.0 - r * r) / (l * l))
}

/// Same lattice sum by a different route: reversed enumeration order and
/// pairwise recursive accumulation instead of a compensated running sum.
/// Exists so the value can be cross-checked independently of summation
/// order; agreement to 1e-12 is part of the scaling record.
pub fn m_r_l_reference(r: f64, l: f64, radius: i64) -> Result<f64> {
    check_m_arguments(r, l, radius)?;
    let mut terms = Vec::with_capacity(((2 * radius + 1) * (2 * radius + 1)) as usize);
    for nx in (-radius..=radius).rev() {
        for ny in (-radius..=radius).rev() {
            terms.push(m_term(r, l, nx, ny));
        }
    }
    Ok(pairwise_sum(&terms) * (1.0 - r * r) / (l * l))
}

fn m_term(r: f64, l: f64, nx: i64, ny: i64) -> f64 {
    let w2 = (2.0 * std::f64::consts::PI / l).powi(2) * ((nx * nx + ny * ny) as f64);
    1.0 / ((1.0 + w2) * (1.0 + r * r * w2))
}

fn check_m_arguments(r: f64, l: f64, radius: i64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) || !(l > 0.0 && l.is_finite()) || radius < 1 {
        return Err(CoreError::InvalidArgument(format!(
            "m_r_l needs r in (0,1), L > 0, radius >= 1; got r={r}, L={l}, radius={radius}"
        )));
    }
    Ok(())
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

const M_RADIUS: i64 = 1024;

/// Three-branch check. Branch rows:
/// - group "deterministic": parameter = eigenvalue rank; values lambda_base,
///   lambda_scaled (= r^-2 times the big-box eigenvalue of the pushed-forward
///   smooth potential), mismatch.
/// - groups "law_lhs"/"law_rhs": per-seed renormalized lambda1 on the base
///   box versus r^-2 * lambda1-tilde + m_{r,L} on the box grown by 1/r with
///   independent noise. Equality holds in law only, so the record compares
///   means and variances against Monte Carlo tolerances and deliberately
///   never pairs paths.
pub fn scaling_identity_check(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.require_seeds()?;
    let q = cfg.integer_inverse_r()?;
    let r = cfg.r;
    let eps = cfg.first_epsilon()?;
    let grid_base = cfg.base_grid()?;
    let grid_big = TorusGrid::new_2d(cfg.n * q, cfg.l * q as f64)?;
    cfg.check_budget(cfg.n * q)?;
    let mut tf = Transformer::new();
    let mut record = ExperimentRecord::new("scaling_identity_check", cfg.config_hash());

    deterministic_branch(cfg, &mut record, grid_base, grid_big, r)?;

    let m = m_r_l(r, cfg.l, M_RADIUS)?;
    let m_ref = m_r_l_reference(r, cfg.l, M_RADIUS)?;
    record.add_summary("m_r_l", m);
    record.add_summary("m_r_l_order_gap", (m - m_ref).abs());

    distributional_branch(cfg, &mut record, &mut tf, grid_base, grid_big, r, eps, m)?;
    Ok(record)
}

/// The smooth potential used by the deterministic branch: two cosine modes,
/// exactly representable on both grids, pushed forward as r^2 V(r y).
fn smooth_potential(grid: TorusGrid, amplitude_scale: f64) -> Result<Field<f64>> {
    debug_assert_eq!(grid.dim(), 2);
    let n = grid.n() as i64;
    let modes = [((2i64, 0i64), 1.5), ((0i64, 1i64), 0.9)];
    let mut coeffs = vec![Complex::new(0.0, 0.0); grid.modes()];
    // A cos(2 pi k.x / L) has coefficients (A L^{dim/2} / 2) at +-k; dim = 2.
    let half = 0.5 * grid.len() * amplitude_scale;
    for ((kx, ky), amp) in modes {
        for (sx, sy) in [(kx, ky), (-kx, -ky)] {
            let ix = if sx >= 0 { sx } else { sx + n } as usize;
            let iy = if sy >= 0 { sy } else { sy + n } as usize;
            coeffs[iy * grid.n() + ix] += Complex::new(half * amp, 0.0);
        }
    }
    Field::from_coeffs(grid, coeffs, "smooth scaling potential")
}

fn deterministic_branch(
    cfg: &ExperimentConfig,
    record: &mut ExperimentRecord,
    grid_base: TorusGrid,
    grid_big: TorusGrid,
    r: f64,
) -> Result<()> {
    let k = cfg.eigen_count;
    let tol = cfg.tol.min(1e-10);
    let t0 = Instant::now();
    let v_base = smooth_potential(grid_base, 1.0)?;
    // r^2 V(r y) on T_{L/r}: the same integer modes with amplitudes r^2.
    let v_big = smooth_potential(grid_big, r * r)?;
    let mut op_base = HamiltonianOp::with_potential(v_base, 0.0)?;
    let mut op_big = HamiltonianOp::with_potential(v_big, 0.0)?;
    let spec_base = solve_lowest(&mut op_base, k, tol, 8.0, derive_seed(0, 0x5CA, 0))?;
    let spec_big = solve_lowest(&mut op_big, k, tol, 8.0, derive_seed(0, 0x5CA, 1))?;
    let wall = t0.elapsed().as_secs_f64() / k as f64;
    let mut max_mismatch = 0.0f64;
    for rank in 0..k {
        let base = spec_base.eigenvalues[rank];
        let scaled = spec_big.eigenvalues[rank] / (r * r);
        let mismatch = (base - scaled).abs();
        max_mismatch = max_mismatch.max(mismatch);
        record.push_row(
            0,
            "deterministic",
            (rank + 1) as f64,
            vec![
                ("lambda_base".to_string(), base),
                ("lambda_scaled".to_string(), scaled),
                ("mismatch".to_string(), mismatch),
            ],
            wall,
        );
    }
    record.add_summary("deterministic_max_mismatch", max_mismatch);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn distributional_branch(
    cfg: &ExperimentConfig,
    record: &mut ExperimentRecord,
    tf: &mut Transformer<f64>,
    grid_base: TorusGrid,
    grid_big: TorusGrid,
    r: f64,
    eps: f64,
    m: f64,
) -> Result<()> {
    let spec_base = MollifierSpec::sharp(eps)?;
    // The pushforward mollifies at eps/r on the grown box.
    let spec_big = MollifierSpec::sharp(eps / r)?;
    let c_big = renorm_constant(grid_big, &spec_big)?;
    let mut lhs = Vec::with_capacity(cfg.seeds.len());
    let mut rhs = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let t0 = Instant::now();
        let enh = enhance(tf, &sample_white_noise(grid_base, seed), &spec_base)?;
        let mut op = HamiltonianOp::from_enhanced(&enh)?;
        let spec =
            solve_lowest(&mut op, 1, cfg.tol, NOISY_SHIFT, derive_seed(seed, 0x5CA, 2))?;
        let a = spec.eigenvalues[0];
        lhs.push(a);
        record.push_row(
            seed,
            "law_lhs",
            eps,
            vec![("lambda1".to_string(), a)],
            t0.elapsed().as_secs_f64(),
        );

        let t1 = Instant::now();
        let seed_big = derive_seed(seed, 0x5CA, 3);
        let noise_big = sample_white_noise(grid_big, seed_big);
        // Operator -Lap + r xi~_eps' + r^2 c~: the scaled potential with its
        // scaled renormalization shift.
        let mut xi_big = mollify(&noise_big, &spec_big);
        xi_big.scale(r);
        let mut op_big = HamiltonianOp::with_potential(xi_big, r * r * c_big)?;
        let spec2 =
            solve_lowest(&mut op_big, 1, cfg.tol, NOISY_SHIFT, derive_seed(seed_big, 0x5CA, 4))?;
        let b = spec2.eigenvalues[0] / (r * r) + m;
        rhs.push(b);
        record.push_row(
            seed_big,
            "law_rhs",
            eps / r,
            vec![("lambda1_scaled".to_string(), b)],
            t1.elapsed().as_secs_f64(),
        );
    }

    let k = cfg.seeds.len() as f64;
    let (mean_l, var_l) = mean_and_variance(&lhs);
    let (mean_r, var_r) = mean_and_variance(&rhs);
    let se = ((var_l + var_r) / k).sqrt();
    // 3 sigma on the mean gap; the variance ratio gets a log-normal bound
    // with a sqrt(2) slack for the skew of the eigenvalue law.
    let mean_tol = 3.0 * se;
    let var_log_tol = 3.0 * (2.0 / (k - 1.0).max(1.0)).sqrt() * std::f64::consts::SQRT_2;
    let var_log_ratio = (var_l / var_r).ln().abs();
    record.add_summary("law_mean_lhs", mean_l);
    record.add_summary("law_mean_rhs", mean_r);
    record.add_summary("law_mean_gap", (mean_l - mean_r).abs());
    record.add_summary("law_mean_tolerance", mean_tol);
    record.add_summary("law_var_lhs", var_l);
    record.add_summary("law_var_rhs", var_r);
    record.add_summary("law_var_log_ratio", var_log_ratio);
    record.add_summary("law_var_log_tolerance", var_log_tol);
    let means_ok = if (mean_l - mean_r).abs() <= mean_tol { 1.0 } else { 0.0 };
    let vars_ok = if var_log_ratio <= var_log_tol { 1.0 } else { 0.0 };
    record.add_summary("law_means_consistent", means_ok);
    record.add_summary("law_vars_consistent", vars_ok);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_constant_agrees_across_summation_orders() {
        let a = m_r_l(0.5, 1.0, 256).unwrap();
        let b = m_r_l_reference(0.5, 1.0, 256).unwrap();
        assert!(a > 0.0 && a < 1.0, "m = {a}");
        assert!((a - b).abs() <= 1e-12, "order gap {}", (a - b).abs());
    }

    #[test]
    fn lattice_constant_has_settled_by_radius_1024() {
        let coarse = m_r_l(0.5, 1.0, 512).unwrap();
        let fine = m_r_l(0.5, 1.0, 1024).unwrap();
        assert!(
            (fine - coarse).abs() <= 3e-8,
            "radius tail {:.3e} too large",
            (fine - coarse).abs()
        );
    }

    #[test]
    fn lattice_constant_rejects_bad_arguments() {
        assert!(m_r_l(1.0, 1.0, 64).is_err());
        assert!(m_r_l(0.5, 0.0, 64).is_err());
        assert!(m_r_l(0.5, 1.0, 0).is_err());
    }

    fn desk_config() -> ExperimentConfig {
        ExperimentConfig::from_toml_str(
            r#"
                experiment = "scaling_identity_check"
                n = 24
                l = 1.0
                epsilons = [0.25]
                seeds = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
                eigen_count = 3
                tol = 1e-8
                r = 0.5
            "#,
        )
        .unwrap()
    }

    #[test]
    fn deterministic_identity_holds_at_desk_scale() {
        let record = scaling_identity_check(&desk_config()).unwrap();
        let mismatch = record.summary("deterministic_max_mismatch").unwrap();
        assert!(mismatch <= 1e-8, "smooth-V rescaling mismatch {mismatch:.3e}");
        assert!((record.summary("m_r_l").unwrap() - m_r_l(0.5, 1.0, 1024).unwrap()).abs() == 0.0);
        assert!(record.summary("m_r_l_order_gap").unwrap() <= 1e-12);
    }

    #[test]
    fn law_branch_moments_agree_within_monte_carlo_error() {
        let record = scaling_identity_check(&desk_config()).unwrap();
        assert_eq!(record.group_rows("law_lhs").len(), 10);
        assert_eq!(record.group_rows("law_rhs").len(), 10);
        assert_eq!(
            record.summary("law_means_consistent"),
            Some(1.0),
            "mean gap {:.3} vs tolerance {:.3}",
            record.summary("law_mean_gap").unwrap(),
            record.summary("law_mean_tolerance").unwrap()
        );
        assert_eq!(
            record.summary("law_vars_consistent"),
            Some(1.0),
            "var log ratio {:.3} vs tolerance {:.3}",
            record.summary("law_var_log_ratio").unwrap(),
            record.summary("law_var_log_tolerance").unwrap()
        );
    }
}
