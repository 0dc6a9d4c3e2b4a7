//! Experiment drivers: deterministic, replayable parameter sweeps over the
//! renormalized spectral problem, emitting long-format records.
//!
//! Every driver takes an [`ExperimentConfig`] and returns an
//! [`ExperimentRecord`]; given the same config the record is bit-identical,
//! field data replaying exactly and eigenvalues to solver tolerance.
//! Assertions about the outputs are shape- and trend-based (monotone Cauchy
//! increments, bounded normalized growth, linear log-tails); absolute
//! magnitudes carry unknown constants and are recorded, not judged.

mod config;
mod growth;
mod lipschitz;
mod localization;
mod records;
mod renorm;
mod scaling;
mod solve;
mod tails;

pub use config::ExperimentConfig;
pub use growth::growth_study;
pub use lipschitz::lipschitz_probe;
pub use localization::localization_diagnostic;
pub use records::{ExperimentRecord, RunRow};
pub use renorm::renorm_sweep;
pub use scaling::{m_r_l, m_r_l_reference, scaling_identity_check};
pub use solve::{solve_lowest, NOISY_SHIFT};
pub use tails::{fit_log_survival, tail_study, TailFit};

use crate::error::CoreError;
use crate::Result;

/// Names accepted by [`run_experiment`] and [`preflight`].
pub const EXPERIMENTS: [&str; 6] = [
    "renorm_sweep",
    "lipschitz_probe",
    "scaling_identity_check",
    "growth_study",
    "tail_study",
    "localization_diagnostic",
];

/// Validates a config for the driver named by `cfg.experiment` without
/// running anything: the same seed, schedule, mollifier, and memory-budget
/// rules the driver itself enforces, so a passing preflight fails later only
/// on solver trouble, never on input shape.
pub fn preflight(cfg: &ExperimentConfig) -> Result<()> {
    cfg.require_seeds()?;
    match cfg.experiment.as_str() {
        "renorm_sweep" => {
            cfg.require_epsilons_decreasing()?;
            cfg.check_budget(cfg.n)?;
            cfg.base_grid()?;
            if cfg.mollifier_kinds()?.is_empty() {
                return Err(CoreError::InvalidArgument("mollifier list is empty".into()));
            }
        }
        "lipschitz_probe" => {
            cfg.require_deltas_decreasing()?;
            cfg.check_budget(cfg.n)?;
            cfg.first_epsilon()?;
            cfg.base_grid()?;
        }
        "scaling_identity_check" => {
            let q = cfg.integer_inverse_r()?;
            cfg.first_epsilon()?;
            cfg.base_grid()?;
            crate::field::TorusGrid::new_2d(cfg.n * q, cfg.l * q as f64)?;
            cfg.check_budget(cfg.n * q)?;
        }
        "growth_study" => {
            cfg.require_l_schedule_increasing(1.0 + 1e-9)?;
            cfg.first_epsilon()?;
            cfg.schedule_grids()?;
        }
        "tail_study" => {
            cfg.check_budget(cfg.n)?;
            cfg.first_epsilon()?;
            cfg.base_grid()?;
            if cfg.mollifier_kinds()?.is_empty() {
                return Err(CoreError::InvalidArgument("mollifier list is empty".into()));
            }
        }
        "localization_diagnostic" => {
            cfg.require_l_schedule_increasing(0.0)?;
            if cfg.l_schedule.len() != 2 {
                return Err(CoreError::InvalidArgument(format!(
                    "localization compares exactly two box sizes, got {:?}",
                    cfg.l_schedule
                )));
            }
            cfg.first_epsilon()?;
            cfg.schedule_grids()?;
        }
        other => {
            return Err(CoreError::InvalidArgument(format!(
                "unknown experiment {other:?}; expected one of {EXPERIMENTS:?}"
            )));
        }
    }
    Ok(())
}

/// Runs the driver named by `cfg.experiment`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    match cfg.experiment.as_str() {
        "renorm_sweep" => renorm_sweep(cfg),
        "lipschitz_probe" => lipschitz_probe(cfg),
        "scaling_identity_check" => scaling_identity_check(cfg),
        "growth_study" => growth_study(cfg),
        "tail_study" => tail_study(cfg),
        "localization_diagnostic" => localization_diagnostic(cfg),
        other => Err(CoreError::InvalidArgument(format!(
            "unknown experiment {other:?}; expected one of {EXPERIMENTS:?}"
        ))),
    }
}
