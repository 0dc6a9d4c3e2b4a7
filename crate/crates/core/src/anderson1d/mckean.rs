//! McKean ground-state statistics: sampled Lambda_1(L) across Brownian
//! paths, centered and scaled so the law approaches the standard Gumbel as
//! L grows.

use crate::anderson1d::{eigenvalues_by_shooting, BrownianPath};
use crate::error::CoreError;
use crate::stats::{derive_seed, gumbel_cdf, ks_statistic};
use crate::Result;
use std::f64::consts::PI;

/// Riccati path resolution per unit length; Lambda_1 is only needed to
/// distributional accuracy, so this stays moderate.
const STEPS_PER_UNIT: f64 = 200.0;
const MIN_STEPS: f64 = 200.0;
const SHOOT_TOL: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct McKeanLevel {
    pub l: f64,
    /// Lambda_1 per path, in path order (deterministic given the seed).
    pub ground_states: Vec<f64>,
    /// Centered values; None when L <= pi, where ln(L/pi) <= 0 makes the
    /// centering undefined.
    pub centered: Option<Vec<f64>>,
    /// KS distance of `centered` to the standard Gumbel CDF.
    pub ks_distance: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct McKeanReport {
    pub seed: u64,
    pub paths_per_l: usize,
    pub levels: Vec<McKeanLevel>,
}

impl McKeanReport {
    /// (L, KS) pairs for the levels where the centering applies, in L order.
    pub fn ks_trend(&self) -> Vec<(f64, f64)> {
        self.levels
            .iter()
            .filter_map(|lv| lv.ks_distance.map(|d| (lv.l, d)))
            .collect()
    }
}

/// -2 * 3^{1/3} (ln L)^{1/3} [lambda + (3/8 ln(L/pi))^{2/3}]; None when the
/// inner logarithm is not positive.
pub fn mckean_centering(l: f64, lambda1: f64) -> Option<f64> {
    if l <= PI {
        return None;
    }
    let a = 0.375 * (l / PI).ln();
    let scale = -2.0 * 3f64.cbrt() * l.ln().cbrt();
    Some(scale * (lambda1 + a.powf(2.0 / 3.0)))
}

/// Samples Lambda_1 over `paths_per_l` Brownian paths at each L, applies the
/// centering, and reports the per-level KS distance to the Gumbel.
pub fn mckean_statistics(
    l_values: &[f64],
    paths_per_l: usize,
    seed: u64,
) -> Result<McKeanReport> {
    if l_values.is_empty() {
        return Err(CoreError::InvalidArgument("empty L schedule".into()));
    }
    if l_values.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(CoreError::InvalidArgument(format!("bad L schedule {l_values:?}")));
    }
    if l_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoreError::InvalidArgument(format!(
            "L schedule must be strictly increasing: {l_values:?}"
        )));
    }
    if paths_per_l < 2 {
        return Err(CoreError::InvalidArgument(format!(
            "need at least 2 paths per L, got {paths_per_l}"
        )));
    }
    let mut levels = Vec::with_capacity(l_values.len());
    for (li, &l) in l_values.iter().enumerate() {
        let steps = (l * STEPS_PER_UNIT).round().max(MIN_STEPS) as usize;
        let h = l / steps as f64;
        let mut ground = Vec::with_capacity(paths_per_l);
        for p in 0..paths_per_l {
            let path = BrownianPath::sample(l, h, derive_seed(seed, li as u64, p as u64))?;
            ground.push(eigenvalues_by_shooting(&path, 1, SHOOT_TOL)?[0]);
        }
        let centered: Option<Vec<f64>> =
            ground.iter().map(|&g| mckean_centering(l, g)).collect();
        let ks_distance = centered.as_ref().map(|c| ks_statistic(c, gumbel_cdf));
        levels.push(McKeanLevel { l, ground_states: ground, centered, ks_distance });
    }
    Ok(McKeanReport { seed, paths_per_l, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::mean_and_variance;

    #[test]
    fn report_is_deterministic_in_the_seed() {
        let a = mckean_statistics(&[8.0, 16.0], 25, 5).unwrap();
        let b = mckean_statistics(&[8.0, 16.0], 25, 5).unwrap();
        for (x, y) in a.levels.iter().zip(&b.levels) {
            assert_eq!(x.ground_states, y.ground_states, "seed 5 must reproduce");
        }
        let c = mckean_statistics(&[8.0, 16.0], 25, 6).unwrap();
        assert_ne!(a.levels[0].ground_states, c.levels[0].ground_states);
    }

    #[test]
    fn small_interval_sanity() {
        // L = 1: finite spread, no centering (ln(L/pi) < 0)
        let r = mckean_statistics(&[1.0], 60, 12).unwrap();
        let lv = &r.levels[0];
        assert!(lv.centered.is_none() && lv.ks_distance.is_none());
        let (mean, var) = mean_and_variance(&lv.ground_states);
        assert!(mean.is_finite() && mean.abs() < 100.0, "mean {mean}");
        assert!(var > 0.0 && var < 1e4, "variance {var}");
        let min = lv.ground_states.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        assert!(min > -1e3, "ground state tail runs away: {min}");
    }

    #[test]
    fn centering_matches_the_closed_form() {
        let l = 50.0f64;
        let lam = -1.3f64;
        let got = mckean_centering(l, lam).unwrap();
        let want = -2.0 * 3f64.powf(1.0 / 3.0)
            * l.ln().powf(1.0 / 3.0)
            * (lam + (3.0 / 8.0 * (l / PI).ln()).powf(2.0 / 3.0));
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!(mckean_centering(3.0, 0.0).is_none(), "L = 3 < pi has no centering");
    }

    #[test]
    fn ks_reported_at_large_l_and_moderately_small() {
        let r = mckean_statistics(&[20.0, 60.0], 150, 3).unwrap();
        for lv in &r.levels {
            let ks = lv.ks_distance.expect("centering applies above pi");
            assert!(ks > 0.0 && ks < 0.5, "L={}: KS {ks} out of the sane range", lv.l);
            assert_eq!(lv.centered.as_ref().unwrap().len(), 150);
        }
        assert_eq!(r.ks_trend().len(), 2);
    }

    #[test]
    fn schedule_validation() {
        assert!(mckean_statistics(&[], 10, 0).is_err());
        assert!(mckean_statistics(&[10.0, 10.0], 10, 0).is_err(), "not increasing");
        assert!(mckean_statistics(&[10.0, 5.0], 10, 0).is_err());
        assert!(mckean_statistics(&[10.0], 1, 0).is_err(), "one path");
    }
}
