//! Localization diagnostic: inverse participation ratio of the ground state
//! on a small box versus a large one.

use std::time::Instant;

use crate::error::CoreError;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::records::ExperimentRecord;
use crate::experiments::solve::{solve_lowest, NOISY_SHIFT};
use crate::field::{Field, Transformer};
use crate::noise::{enhance, sample_white_noise, MollifierSpec};
use crate::operator::{inverse_participation_ratio, HamiltonianOp};
use crate::stats::{derive_seed, median};
use crate::Result;

/// Exactly two box sizes, small then large, at fixed modes per unit length.
/// Rows carry lambda1, the IPR, and IPR times the box area (1 for a flat
/// state, larger for concentrated ones); summaries carry per-box medians and
/// the flag `ipr_area_grows` = 1 when the large box's median normalized IPR
/// exceeds the small box's, the localization signature.
pub fn localization_diagnostic(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.require_seeds()?;
    cfg.require_l_schedule_increasing(0.0)?;
    if cfg.l_schedule.len() != 2 {
        return Err(CoreError::InvalidArgument(format!(
            "localization compares exactly two box sizes, got {:?}",
            cfg.l_schedule
        )));
    }
    let eps = cfg.first_epsilon()?;
    let m = MollifierSpec::sharp(eps)?;
    let grids = cfg.schedule_grids()?;

    let mut tf = Transformer::new();
    let mut record = ExperimentRecord::new("localization_diagnostic", cfg.config_hash());
    for &(l, grid) in &grids {
        for &seed in &cfg.seeds {
            let t0 = Instant::now();
            let spec = if cfg.zero_noise {
                let mut op =
                    HamiltonianOp::with_potential(Field::zeros(grid, "zero potential"), 0.0)?;
                solve_lowest(&mut op, 1, cfg.tol, NOISY_SHIFT, derive_seed(seed, 0x10C, 0))?
            } else {
                let enh = enhance(&mut tf, &sample_white_noise(grid, seed), &m)?;
                let mut op = HamiltonianOp::from_enhanced(&enh)?;
                solve_lowest(&mut op, 1, cfg.tol, NOISY_SHIFT, derive_seed(seed, 0x10C, 0))?
            };
            let ipr = inverse_participation_ratio(&mut tf, &spec.eigenvectors[0])?;
            record.push_row(
                seed,
                "ipr",
                l,
                vec![
                    ("lambda1".to_string(), spec.eigenvalues[0]),
                    ("ipr".to_string(), ipr),
                    ("ipr_area".to_string(), ipr * l * l),
                ],
                t0.elapsed().as_secs_f64(),
            );
        }
    }

    let mut medians = Vec::new();
    for &(l, _) in &grids {
        let samples: Vec<f64> = record
            .rows
            .iter()
            .filter(|r| r.parameter == l)
            .filter_map(|r| r.value("ipr_area"))
            .collect();
        let med = median(&samples);
        record.add_summary(&format!("ipr_area_median/{l}"), med);
        medians.push(med);
    }
    // Relative dead band: flat zero-noise states land within float dust of
    // each other and must not register as growth.
    let grows = if medians[1] > medians[0] * (1.0 + 1e-9) { 1.0 } else { 0.0 };
    record.add_summary("ipr_area_grows", grows);
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::TorusGrid;
    use num_complex::Complex;

    fn desk_config() -> ExperimentConfig {
        ExperimentConfig::from_toml_str(
            r#"
                experiment = "localization_diagnostic"
                epsilons = [0.25]
                l_schedule = [1.0, 3.0]
                n_per_unit = 16
                seeds = [4, 12, 27]
                tol = 1e-7
            "#,
        )
        .unwrap()
    }

    #[test]
    fn zero_noise_ground_state_is_flat_with_ipr_one_over_area() {
        let mut cfg = desk_config();
        cfg.zero_noise = true;
        cfg.seeds = vec![1];
        let record = localization_diagnostic(&cfg).unwrap();
        for row in &record.rows {
            let l = row.parameter;
            let ipr = row.value("ipr").unwrap();
            assert!(
                (ipr - 1.0 / (l * l)).abs() <= 1e-9,
                "flat state IPR at L = {l}: {ipr} vs {}",
                1.0 / (l * l)
            );
        }
        assert_eq!(record.summary("ipr_area_grows"), Some(0.0), "flat states never grow");
    }

    #[test]
    fn noisy_rows_and_medians_are_recorded_deterministically() {
        let cfg = desk_config();
        let a = localization_diagnostic(&cfg).unwrap();
        assert_eq!(a.rows.len(), 6, "2 boxes x 3 seeds");
        for row in &a.rows {
            let area = row.parameter * row.parameter;
            let ipr = row.value("ipr").unwrap();
            assert!(
                ipr >= 1.0 / area - 1e-9,
                "IPR {ipr} cannot undercut the flat bound {}",
                1.0 / area
            );
        }
        assert!(a.summary("ipr_area_median/1").is_some());
        assert!(a.summary("ipr_area_median/3").is_some());
        let b = localization_diagnostic(&cfg).unwrap();
        assert!(a.same_results(&b), "replay must reproduce every value");
    }

    #[test]
    fn schedule_must_be_exactly_two_boxes() {
        let mut cfg = desk_config();
        cfg.l_schedule = vec![1.0, 2.0, 3.0];
        assert!(localization_diagnostic(&cfg).is_err());
    }

    #[test]
    fn deterministic_single_well_concentrates_the_ground_state() {
        // A deep smooth well at fixed position: the ground state lives in
        // it, so the IPR clearly exceeds the flat-state 1/L^2.
        let grid = TorusGrid::new_2d(32, 1.0).unwrap();
        let n = grid.n();
        let mut coeffs = vec![Complex::new(0.0, 0.0); grid.modes()];
        // -A (cos(2 pi x) + cos(2 pi y)) has a well at (1/2, 1/2); the
        // cosine coefficient is A L^{dim/2} / 2 at each of the four modes.
        let amp = 40.0;
        for (kx, ky) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
            let ix = if kx >= 0 { kx } else { kx + n as i64 } as usize;
            let iy = if ky >= 0 { ky } else { ky + n as i64 } as usize;
            coeffs[iy * n + ix] = Complex::new(-amp / 2.0, 0.0);
        }
        let v = Field::from_coeffs(grid, coeffs, "single well").unwrap();
        let mut op = HamiltonianOp::with_potential(v, 0.0).unwrap();
        let spec = solve_lowest(&mut op, 1, 1e-9, 8.0, 7).unwrap();
        let mut tf = Transformer::new();
        let ipr = inverse_participation_ratio(&mut tf, &spec.eigenvectors[0]).unwrap();
        assert!(
            ipr > 2.0,
            "well-bound state should concentrate: IPR = {ipr} vs flat 1.0"
        );
    }
}
