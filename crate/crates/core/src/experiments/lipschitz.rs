//! Lipschitz probe: eigenvalue response to perturbations of the enhanced
//! noise, measured against the enhanced-data distance.

use std::time::Instant;

use crate::experiments::config::ExperimentConfig;
use crate::experiments::records::ExperimentRecord;
use crate::experiments::solve::{solve_lowest, NOISY_SHIFT};
use crate::field::Transformer;
use crate::noise::{enhance, mollify, resonant_enhancement, sample_white_noise, MollifierSpec};
use crate::operator::HamiltonianOp;
use crate::paracalc::{besov_norm, DyadicPartition, LebesgueExp};
use crate::stats::derive_seed;
use crate::Result;

/// Besov exponents of the enhanced-data distance: the mollified noise lives
/// just below C^{-1}, its second-order datum just below C^0.
const ALPHA_XI: f64 = -1.1;
const ALPHA_XI2: f64 = -0.2;

/// For each seed: fix an enhanced noise Xi, then for each delta perturb the
/// Gaussians by delta times an independent draw, re-enhance honestly
/// (the renormalization constant scales by 1 + delta^2 because the combined
/// noise has that variance), and record |Delta lambda_n| / d(Xi', Xi) with
/// d = ||xi' - xi||_{C^alpha} + ||Xi2' - Xi2||_{C^{2 alpha + 2}}.
///
/// delta = 0 is allowed as an edge: the perturbed realization is bitwise the
/// base one, so shift and distance are exactly zero and no ratio is formed.
pub fn lipschitz_probe(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.require_seeds()?;
    cfg.require_deltas_decreasing()?;
    cfg.check_budget(cfg.n)?;
    let eps = cfg.first_epsilon()?;
    let grid = cfg.base_grid()?;
    let m = MollifierSpec::sharp(eps)?;
    let part = DyadicPartition::for_grid(&grid);
    let mut tf = Transformer::new();
    let mut record = ExperimentRecord::new("lipschitz_probe", cfg.config_hash());

    for &seed in &cfg.seeds {
        let noise = sample_white_noise(grid, seed);
        let probe = sample_white_noise(grid, derive_seed(seed, 0x11F, 1));
        let enh = enhance(&mut tf, &noise, &m)?;
        let mut op = HamiltonianOp::from_enhanced(&enh)?;
        let base = solve_lowest(
            &mut op,
            cfg.eigen_count,
            cfg.tol,
            NOISY_SHIFT,
            derive_seed(seed, 0x11F, 2),
        )?;

        for &delta in &cfg.deltas {
            let t0 = Instant::now();
            let combined = noise.linear_combination(&probe, 1.0, delta)?;
            let xi_p = mollify(&combined, &m);
            let c_p = (1.0 + delta * delta) * enh.c_eps;
            let xi2_p = resonant_enhancement(&mut tf, &xi_p, c_p, &part)?;

            let mut dxi = xi_p.clone();
            dxi.axpy(-1.0, &enh.xi_eps)?;
            let mut dxi2 = xi2_p.clone();
            dxi2.axpy(-1.0, &enh.xi2_eps)?;
            let distance = besov_norm(&mut tf, &dxi, ALPHA_XI, LebesgueExp::Inf, LebesgueExp::Inf, &part)?
                .value
                + besov_norm(&mut tf, &dxi2, ALPHA_XI2, LebesgueExp::Inf, LebesgueExp::Inf, &part)?
                    .value;

            let mut values = vec![("distance".to_string(), distance)];
            if delta == 0.0 {
                // Bitwise-identical field: no solve needed for the shift to
                // be exactly zero, but resolve it anyway to keep the row
                // honest rather than assumed.
                let mut op_p = HamiltonianOp::with_potential(xi_p, c_p)?;
                let spec_p = solve_lowest(
                    &mut op_p,
                    cfg.eigen_count,
                    cfg.tol,
                    NOISY_SHIFT,
                    derive_seed(seed, 0x11F, 2),
                )?;
                for (i, (&a, &b)) in
                    base.eigenvalues.iter().zip(&spec_p.eigenvalues).enumerate()
                {
                    values.push((format!("shift{}", i + 1), (b - a).abs()));
                }
            } else {
                let mut op_p = HamiltonianOp::with_potential(xi_p, c_p)?;
                let spec_p = solve_lowest(
                    &mut op_p,
                    cfg.eigen_count,
                    cfg.tol,
                    NOISY_SHIFT,
                    derive_seed(seed, 0x11F, 3),
                )?;
                for (i, (&a, &b)) in
                    base.eigenvalues.iter().zip(&spec_p.eigenvalues).enumerate()
                {
                    let shift = (b - a).abs();
                    values.push((format!("shift{}", i + 1), shift));
                    values.push((format!("ratio{}", i + 1), shift / distance));
                }
            }
            record.push_row(seed, "delta", delta, values, t0.elapsed().as_secs_f64());
        }
    }

    summarize(cfg, &mut record);
    Ok(record)
}

/// Per delta: the max ratio over seeds and ranks; plus the small-over-large
/// contrast that the boundedness claim rests on.
fn summarize(cfg: &ExperimentConfig, record: &mut ExperimentRecord) {
    let mut per_delta: Vec<(f64, f64)> = Vec::new();
    for &delta in &cfg.deltas {
        if delta == 0.0 {
            continue;
        }
        let mut max_ratio = 0.0f64;
        for row in record.rows.iter().filter(|r| r.parameter == delta) {
            for (k, v) in &row.values {
                if k.starts_with("ratio") {
                    max_ratio = max_ratio.max(*v);
                }
            }
        }
        per_delta.push((delta, max_ratio));
    }
    let mut summaries: Vec<(String, f64)> = Vec::new();
    for (i, &(delta, max_ratio)) in per_delta.iter().enumerate() {
        summaries.push((format!("ratio_max/{i}"), max_ratio));
        summaries.push((format!("ratio_delta/{i}"), delta));
    }
    if per_delta.len() >= 2 {
        let largest = per_delta.first().expect("nonempty").1;
        let smallest = per_delta.last().expect("nonempty").1;
        summaries.push(("ratio_small_over_large".to_string(), smallest / largest));
    }
    for (k, v) in summaries {
        record.add_summary(&k, v);
    }
}
