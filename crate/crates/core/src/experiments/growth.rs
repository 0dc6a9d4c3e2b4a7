//! Growth study: normalized eigenvalue and noise magnitudes along a schedule
//! of box sizes at fixed per-unit resolution.

use std::time::Instant;

use crate::experiments::config::ExperimentConfig;
use crate::experiments::records::ExperimentRecord;
use crate::experiments::solve::{solve_lowest, NOISY_SHIFT};
use crate::field::{Field, Transformer};
use crate::noise::{enhance, sample_white_noise, MollifierSpec};
use crate::operator::HamiltonianOp;
use crate::paracalc::{besov_norm, DyadicPartition, LebesgueExp};
use crate::stats::{derive_seed, mean_and_variance};
use crate::Result;

const ALPHA_XI: f64 = -1.1;
const ALPHA_XI2: f64 = -0.2;

/// Per box size L (strictly increasing, each > 1 so log L > 0), at fixed
/// epsilon and fixed modes-per-unit-length: the seed-mean of |lambda1|/log L,
/// ||xi_eps||_{C^alpha}/sqrt(log L), and ||Xi2||_{C^{2 alpha + 2}}/log L.
/// The trend summary is the largest forward z-score between box sizes; the
/// boundedness claim is that it stays within 2.
///
/// Refuses schedules whose largest grid would blow the configured memory
/// budget instead of starting a run that cannot finish.
pub fn growth_study(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.require_seeds()?;
    cfg.require_l_schedule_increasing(1.0 + 1e-9)?;
    let eps = cfg.first_epsilon()?;
    let m = MollifierSpec::sharp(eps)?;
    // Validate the whole schedule before paying for any solve.
    let grids = cfg.schedule_grids()?;

    let mut tf = Transformer::new();
    let mut record = ExperimentRecord::new("growth_study", cfg.config_hash());
    for &(l, grid) in &grids {
        let part = DyadicPartition::for_grid(&grid);
        let log_l = l.ln();
        for &seed in &cfg.seeds {
            let t0 = Instant::now();
            let (lam1, nxi, nxi2) = if cfg.zero_noise {
                let mut op =
                    HamiltonianOp::with_potential(Field::zeros(grid, "zero potential"), 0.0)?;
                let spec =
                    solve_lowest(&mut op, 1, cfg.tol, NOISY_SHIFT, derive_seed(seed, 0x960, 0))?;
                (spec.eigenvalues[0], 0.0, 0.0)
            } else {
                let enh = enhance(&mut tf, &sample_white_noise(grid, seed), &m)?;
                let mut op = HamiltonianOp::from_enhanced(&enh)?;
                let spec =
                    solve_lowest(&mut op, 1, cfg.tol, NOISY_SHIFT, derive_seed(seed, 0x960, 0))?;
                let nxi = besov_norm(
                    &mut tf,
                    &enh.xi_eps,
                    ALPHA_XI,
                    LebesgueExp::Inf,
                    LebesgueExp::Inf,
                    &part,
                )?
                .value;
                let nxi2 = besov_norm(
                    &mut tf,
                    &enh.xi2_eps,
                    ALPHA_XI2,
                    LebesgueExp::Inf,
                    LebesgueExp::Inf,
                    &part,
                )?
                .value;
                (spec.eigenvalues[0], nxi, nxi2)
            };
            record.push_row(
                seed,
                "growth",
                l,
                vec![
                    ("lambda1".to_string(), lam1),
                    ("lambda_ratio".to_string(), lam1.abs() / log_l),
                    ("xi_ratio".to_string(), nxi / log_l.sqrt()),
                    ("xi2_ratio".to_string(), nxi2 / log_l),
                ],
                t0.elapsed().as_secs_f64(),
            );
        }
    }

    for key in ["lambda_ratio", "xi_ratio", "xi2_ratio"] {
        let mut stats = Vec::new();
        for &(l, _) in &grids {
            let samples: Vec<f64> = record
                .rows
                .iter()
                .filter(|r| r.parameter == l)
                .filter_map(|r| r.value(key))
                .collect();
            let (mean, var) = mean_and_variance(&samples);
            let se = (var / samples.len() as f64).sqrt();
            record.add_summary(&format!("{key}_mean/{l}"), mean);
            record.add_summary(&format!("{key}_se/{l}"), se);
            stats.push((mean, se));
        }
        // Worst forward pairwise z-score: positive means growth.
        let mut z_max = f64::NEG_INFINITY;
        for i in 0..stats.len() {
            for j in (i + 1)..stats.len() {
                let denom = (stats[i].1.powi(2) + stats[j].1.powi(2)).sqrt().max(1e-300);
                z_max = z_max.max((stats[j].0 - stats[i].0) / denom);
            }
        }
        record.add_summary(&format!("{key}_trend_z"), z_max);
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::CoreError;

    fn desk_config() -> ExperimentConfig {
        ExperimentConfig::from_toml_str(
            r#"
                experiment = "growth_study"
                epsilons = [0.25]
                l_schedule = [2.0, 3.0]
                n_per_unit = 12
                seeds = [2, 9, 31, 40]
                tol = 1e-7
            "#,
        )
        .unwrap()
    }

    #[test]
    fn rows_cover_the_schedule_and_summaries_exist() {
        let record = growth_study(&desk_config()).unwrap();
        assert_eq!(record.rows.len(), 8, "2 box sizes x 4 seeds");
        for key in ["lambda_ratio_trend_z", "xi_ratio_trend_z", "xi2_ratio_trend_z"] {
            let z = record.summary(key).unwrap();
            assert!(z.is_finite(), "{key} = {z}");
        }
        assert!(record.summary("lambda_ratio_mean/2").is_some());
    }

    #[test]
    fn zero_noise_ratios_vanish_identically() {
        let mut cfg = desk_config();
        cfg.zero_noise = true;
        cfg.seeds = vec![1];
        let record = growth_study(&cfg).unwrap();
        for row in &record.rows {
            assert!(row.value("lambda1").unwrap().abs() <= 1e-7);
            assert_eq!(row.value("xi_ratio"), Some(0.0));
            assert_eq!(row.value("xi2_ratio"), Some(0.0));
        }
    }

    #[test]
    fn memory_budget_refuses_oversized_schedules() {
        let mut cfg = desk_config();
        cfg.max_bytes = 1;
        let err = growth_study(&cfg).unwrap_err();
        assert!(matches!(err, CoreError::BudgetExceeded(_)), "{err}");
    }

    #[test]
    fn log_l_must_be_positive() {
        let mut cfg = desk_config();
        cfg.l_schedule = vec![1.0, 2.0];
        assert!(growth_study(&cfg).is_err(), "L = 1 has log L = 0");
    }

    #[test]
    fn fractional_grids_are_rejected() {
        let mut cfg = desk_config();
        cfg.l_schedule = vec![2.0, 2.7];
        assert!(growth_study(&cfg).is_err(), "12 * 2.7 is not an even integer");
    }
}
