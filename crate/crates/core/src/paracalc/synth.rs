//! Deterministic random fields of prescribed regularity, for tests and
//! norm-estimator calibration.

use crate::field::{Field, TorusGrid};
use crate::rng::mode_gaussians;
use crate::scalar::Real;
use crate::Result;
use num_complex::Complex;

/// Gaussian field with coefficients (1 + |omega|^2)^{-(alpha + dim/2)/2} g_k,
/// so the realization lies in C^{alpha'} for alpha' < alpha and not above;
/// alpha = -dim/2 reproduces the flat white-noise spectrum. Mode-keyed RNG
/// streams make the same seed produce the same field on every grid resolution
/// (coarser grids are restrictions of finer ones).
pub fn synth_field<S: Real>(grid: TorusGrid, alpha: f64, seed: u64) -> Result<Field<S>> {
    let g = mode_gaussians(grid, seed);
    let half_exp = -0.5 * (alpha + grid.dim() as f64 / 2.0);
    let coeffs = (0..grid.modes())
        .map(|flat| {
            let w = (1.0 + grid.freq_norm_sq(flat)).powf(half_exp);
            let z = g[flat] * w;
            Complex::new(S::of(z.re), S::of(z.im))
        })
        .collect();
    Field::from_coeffs(grid, coeffs, format!("synth(alpha={alpha},seed={seed})"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let g = TorusGrid::new_2d(32, 1.0).unwrap();
        let a = synth_field::<f64>(g, -1.05, 5).unwrap();
        let b = synth_field::<f64>(g, -1.05, 5).unwrap();
        assert_eq!(a.coeffs(), b.coeffs());
        let c = synth_field::<f64>(g, -1.05, 6).unwrap();
        assert_ne!(a.coeffs(), c.coeffs());
    }

    #[test]
    fn restriction_across_resolutions() {
        let fine = TorusGrid::new_2d(64, 2.0).unwrap();
        let coarse = TorusGrid::new_2d(32, 2.0).unwrap();
        let ff = synth_field::<f64>(fine, -0.7, 9).unwrap();
        let fc = synth_field::<f64>(coarse, -0.7, 9).unwrap();
        for flat in 0..coarse.modes() {
            if coarse.is_nyquist(flat) {
                continue;
            }
            let m = coarse.mode(flat);
            let other = fine.flat_of_mode(m).unwrap();
            assert_eq!(fc.coeffs()[flat], ff.coeffs()[other], "mode {m:?} differs");
        }
    }

    #[test]
    fn large_alpha_is_smooth() {
        let g = TorusGrid::new_2d(64, 1.0).unwrap();
        let f = synth_field::<f64>(g, 6.0, 1).unwrap();
        // weight decays like |omega|^{alpha - 1}, so high modes are tiny
        let mut far = 0.0f64;
        for flat in 0..g.modes() {
            if g.freq_norm_sq(flat).sqrt() > 100.0 {
                far = far.max(f.coeffs()[flat].norm());
            }
        }
        let near = f.coeffs()[g.flat_of_mode([1, 0]).unwrap()].norm();
        assert!(far < 1e-3 * near.max(1e-12), "far = {far:.3e}, near = {near:.3e}");
    }
}
