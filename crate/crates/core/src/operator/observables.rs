//! Spectral observables: Rayleigh quotients, the projected heat semigroup,
//! and the inverse participation ratio.

use crate::error::CoreError;
use crate::field::{dealias_size, Field, Transformer};
use crate::operator::{HamiltonianOp, SpectrumResult};
use crate::Result;

/// <H f, f> / <f, f>; by min-max this is always >= the ground eigenvalue.
pub fn rayleigh_quotient(op: &mut HamiltonianOp, f: &Field<f64>) -> Result<f64> {
    let n2 = f.l2_inner(f)?;
    if n2 == 0.0 {
        return Err(CoreError::ZeroField { context: "Rayleigh quotient input" });
    }
    let hf = op.apply(f)?;
    Ok(hf.l2_inner(f)? / n2)
}

#[derive(Debug)]
pub struct HeatEvolution {
    /// exp(-tH) u0 projected on the computed eigenspace span{v_1..v_K}.
    pub field: Field<f64>,
    /// Bound on the dropped complement: exp(-t Lambda_K) ||u0 - P u0||,
    /// valid because everything outside the span sits above Lambda_K.
    pub tail_bound: f64,
    pub t: f64,
}

/// Heat semigroup through a computed spectrum: exp(-tH) u0 on the eigenspace
/// span, with a rigorous bound on what the truncation dropped.
pub fn heat_semigroup(
    spectrum: &SpectrumResult,
    u0: &Field<f64>,
    t: f64,
) -> Result<HeatEvolution> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(CoreError::InvalidArgument(format!(
            "heat semigroup needs t >= 0, got {t}"
        )));
    }
    let k = spectrum.eigenvalues.len();
    if k == 0 {
        return Err(CoreError::InvalidArgument("empty spectrum".into()));
    }
    let mut out = Field::zeros(u0.grid(), format!("exp(-{t} H) u0"));
    let mut projected = Field::zeros(u0.grid(), "P u0");
    for (lambda, v) in spectrum.eigenvalues.iter().zip(&spectrum.eigenvectors) {
        let c = u0.l2_inner(v)?;
        out.axpy(c * (-t * lambda).exp(), v)?;
        projected.axpy(c, v)?;
    }
    projected.axpy(-1.0, u0)?;
    let orth = projected.l2_norm();
    let tail_bound = (-t * spectrum.eigenvalues[k - 1]).exp() * orth;
    Ok(HeatEvolution { field: out, tail_bound, t })
}

/// IPR = integral |f|^4 / (integral |f|^2)^2. Both integrals are evaluated
/// by the lattice rule on the 2N refinement, where they are exact: |f|^4 has
/// per-axis bandwidth 2N - 4 < 2N.
pub fn inverse_participation_ratio(
    tf: &mut Transformer<f64>,
    f: &Field<f64>,
) -> Result<f64> {
    let grid = f.grid();
    let m = (2 * grid.n()).max(dealias_size(grid.n()));
    let samples = tf.to_physical_padded(f, m)?;
    let cell = (grid.len() / m as f64).powi(grid.dim() as i32);
    let mut s2 = 0.0f64;
    let mut s4 = 0.0f64;
    for &s in &samples {
        let q = s * s;
        s2 += q;
        s4 += q * q;
    }
    s2 *= cell;
    s4 *= cell;
    if s2 == 0.0 {
        return Err(CoreError::ZeroField { context: "IPR input" });
    }
    Ok(s4 / (s2 * s2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::TorusGrid;
    use crate::noise::{enhance, sample_white_noise, MollifierSpec};
    use crate::operator::lowest_eigenpairs;
    use crate::paracalc::synth_field;
    use num_complex::Complex;

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    fn noisy_op(n: usize, seed: u64) -> HamiltonianOp {
        let grid = TorusGrid::new_2d(n, 1.0).unwrap();
        let noise = sample_white_noise(grid, seed);
        let m = MollifierSpec::sharp(0.05).unwrap();
        let mut tf = Transformer::new();
        let e = enhance(&mut tf, &noise, &m).unwrap();
        HamiltonianOp::from_enhanced(&e).unwrap()
    }

    #[test]
    fn rayleigh_of_eigenvector_is_eigenvalue() {
        let mut op = noisy_op(16, 41);
        let out = lowest_eigenpairs(&mut op, 2, 1e-10, 3).unwrap();
        for i in 0..2 {
            let q = rayleigh_quotient(&mut op, &out.eigenvectors[i]).unwrap();
            assert!(
                (q - out.eigenvalues[i]).abs() <= 1e-8,
                "pair {i}: quotient {q} vs {}",
                out.eigenvalues[i]
            );
        }
    }

    #[test]
    fn min_max_over_fifty_subspaces() {
        let mut op = noisy_op(16, 23);
        let ground = lowest_eigenpairs(&mut op, 1, 1e-10, 9).unwrap().eigenvalues[0];
        for seed in 0..50 {
            let f = synth_field::<f64>(op.grid(), 0.7, 1000 + seed).unwrap();
            let q = rayleigh_quotient(&mut op, &f).unwrap();
            assert!(
                q >= ground - 1e-8,
                "seed {seed}: Rayleigh {q} undercuts ground {ground}"
            );
        }
    }

    #[test]
    fn zero_field_rejected_everywhere() {
        let grid = TorusGrid::new_2d(8, 1.0).unwrap();
        let mut op = HamiltonianOp::zero_noise(grid).unwrap();
        let z = Field::zeros(grid, "zero");
        assert!(matches!(
            rayleigh_quotient(&mut op, &z),
            Err(CoreError::ZeroField { .. })
        ));
        let mut tf = Transformer::new();
        assert!(matches!(
            inverse_participation_ratio(&mut tf, &z),
            Err(CoreError::ZeroField { .. })
        ));
    }

    #[test]
    fn heat_semigroup_decays_a_pure_mode() {
        let grid = TorusGrid::new_2d(16, 1.0).unwrap();
        let mut op = HamiltonianOp::zero_noise(grid).unwrap();
        let spec = lowest_eigenpairs(&mut op, 5, 1e-10, 4).unwrap();
        let mut coeffs = vec![Complex::new(0.0f64, 0.0); grid.modes()];
        coeffs[grid.flat_of_mode([1, 0]).unwrap()] = Complex::new(1.0, 0.0);
        coeffs[grid.flat_of_mode([-1, 0]).unwrap()] = Complex::new(1.0, 0.0);
        let u0 = Field::from_coeffs(grid, coeffs, "cos mode").unwrap();
        let t = 0.01;
        let evo = heat_semigroup(&spec, &u0, t).unwrap();
        let lambda = TWO_PI * TWO_PI;
        let mut want = u0.clone();
        want.scale((-t * lambda).exp());
        let mut diff = evo.field;
        diff.axpy(-1.0, &want).unwrap();
        assert!(
            diff.l2_norm() <= 1e-8 * want.l2_norm(),
            "decay defect {}",
            diff.l2_norm()
        );
        assert!(evo.tail_bound <= 1e-7, "tail bound {}", evo.tail_bound);
    }

    #[test]
    fn heat_semigroup_composes() {
        let mut op = noisy_op(16, 19);
        let spec = lowest_eigenpairs(&mut op, 6, 1e-10, 2).unwrap();
        let u0 = synth_field::<f64>(op.grid(), 1.0, 55).unwrap();
        let (t, s) = (0.002, 0.007);
        let two_step = {
            let first = heat_semigroup(&spec, &u0, t).unwrap();
            heat_semigroup(&spec, &first.field, s).unwrap().field
        };
        let one_step = heat_semigroup(&spec, &u0, t + s).unwrap().field;
        let mut diff = two_step;
        diff.axpy(-1.0, &one_step).unwrap();
        let rel = diff.l2_norm() / one_step.l2_norm();
        assert!(rel <= 1e-12, "semigroup defect {rel:.3e}");
    }

    #[test]
    fn negative_time_rejected() {
        let grid = TorusGrid::new_2d(8, 1.0).unwrap();
        let mut op = HamiltonianOp::zero_noise(grid).unwrap();
        let spec = lowest_eigenpairs(&mut op, 1, 1e-10, 1).unwrap();
        let u0 = synth_field::<f64>(grid, 1.0, 2).unwrap();
        assert!(heat_semigroup(&spec, &u0, -0.5).is_err());
    }

    #[test]
    fn ipr_of_flat_state_is_inverse_volume() {
        let grid = TorusGrid::new_2d(16, 2.0).unwrap();
        let mut f = Field::zeros(grid, "flat");
        f.add_constant(3.7);
        let mut tf = Transformer::new();
        let ipr = inverse_participation_ratio(&mut tf, &f).unwrap();
        let want = 1.0 / (2.0 * 2.0);
        assert!((ipr - want).abs() <= 1e-12, "IPR {ipr} vs {want}");
    }

    #[test]
    fn ipr_of_cosine_closed_form() {
        // f = C cos(2 pi x / L): IPR = (3/8 C^4 L^2) / (C^2 L^2 / 2)^2 = 3/(2 L^2)
        let l = 2.0;
        let grid = TorusGrid::new_2d(32, l).unwrap();
        let mut coeffs = vec![Complex::new(0.0f64, 0.0); grid.modes()];
        coeffs[grid.flat_of_mode([2, 1]).unwrap()] = Complex::new(0.8, 0.0);
        coeffs[grid.flat_of_mode([-2, -1]).unwrap()] = Complex::new(0.8, 0.0);
        let f = Field::from_coeffs(grid, coeffs, "cos").unwrap();
        let mut tf = Transformer::new();
        let ipr = inverse_participation_ratio(&mut tf, &f).unwrap();
        let want = 1.5 / (l * l);
        assert!((ipr - want).abs() <= 1e-12, "IPR {ipr} vs {want}");
    }

    #[test]
    fn ipr_detects_concentration() {
        // a field with all its mass in a few cells beats a spread-out one
        let grid = TorusGrid::new_2d(32, 1.0).unwrap();
        let spread = synth_field::<f64>(grid, 3.0, 6).unwrap();
        let peaked = synth_field::<f64>(grid, 0.2, 6).unwrap();
        let mut tf = Transformer::new();
        let a = inverse_participation_ratio(&mut tf, &spread).unwrap();
        let b = inverse_participation_ratio(&mut tf, &peaked).unwrap();
        assert!(b > a, "peaked {b} should exceed smooth {a}");
    }
}
