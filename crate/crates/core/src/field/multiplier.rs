//! Fourier multipliers: sigma(D), sigma_a(D), the Laplacian symbol, and
//! validated custom even symbols.

use super::{Field, TorusGrid};
use crate::error::CoreError;
use crate::scalar::Real;
use crate::Result;
use num_complex::Complex;
use std::sync::Arc;

#[derive(Clone)]
pub enum MultiplierKind {
    /// sigma(omega) = -1/(1 + |omega|^2)
    Sigma,
    /// sigma_a(omega) = -1/(a + |omega|^2)
    SigmaA(f64),
    /// Delta symbol: -|omega|^2
    Laplacian,
    /// arbitrary even symbol of the frequency vector
    Custom(Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>),
}

#[derive(Clone)]
pub struct MultiplierSpec {
    name: String,
    kind: MultiplierKind,
}

impl std::fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiplierSpec").field("name", &self.name).finish()
    }
}

impl MultiplierSpec {
    pub fn sigma() -> Self {
        MultiplierSpec { name: "sigma".into(), kind: MultiplierKind::Sigma }
    }

    pub fn sigma_a(a: f64) -> Self {
        MultiplierSpec { name: format!("sigma_{a}"), kind: MultiplierKind::SigmaA(a) }
    }

    pub fn laplacian() -> Self {
        MultiplierSpec { name: "laplacian".into(), kind: MultiplierKind::Laplacian }
    }

    pub fn custom(
        name: impl Into<String>,
        symbol: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MultiplierSpec { name: name.into(), kind: MultiplierKind::Custom(Arc::new(symbol)) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Shift parameter a, when the symbol has one.
    pub fn parameter(&self) -> Option<f64> {
        match self.kind {
            MultiplierKind::SigmaA(a) => Some(a),
            _ => None,
        }
    }

    pub fn symbol(&self, freq: [f64; 2]) -> f64 {
        let w2 = freq[0] * freq[0] + freq[1] * freq[1];
        match &self.kind {
            MultiplierKind::Sigma => -1.0 / (1.0 + w2),
            MultiplierKind::SigmaA(a) => -1.0 / (a + w2),
            MultiplierKind::Laplacian => -w2,
            MultiplierKind::Custom(f) => f(freq),
        }
    }

    fn is_radial(&self) -> bool {
        !matches!(self.kind, MultiplierKind::Custom(_))
    }
}

/// coeffs_out(k) = symbol(frequency(k)) * coeffs_in(k).
///
/// Rejects symbols that are non-finite anywhere on the lattice (so sigma_a
/// needs a > 0) and custom symbols that fail evenness, which would break the
/// Hermitian symmetry of real fields.
pub fn apply_multiplier<S: Real>(m: &MultiplierSpec, f: &Field<S>) -> Result<Field<S>> {
    let grid = f.grid();
    let values = symbol_values(m, grid)?;
    let mut out = f.coeffs().to_vec();
    for (i, c) in out.iter_mut().enumerate() {
        if grid.is_nyquist(i) {
            *c = Complex::default();
        } else {
            let s = S::of(values[i]);
            c.re *= s;
            c.im *= s;
        }
    }
    Ok(Field::from_coeffs_unchecked(grid, out, format!("{}({})", m.name, f.label())))
}

/// Validated symbol values on every lattice point.
pub(crate) fn symbol_values(m: &MultiplierSpec, grid: TorusGrid) -> Result<Vec<f64>> {
    let mut values = vec![0.0f64; grid.modes()];
    let mut max_abs = 0.0f64;
    for (i, v) in values.iter_mut().enumerate() {
        let s = m.symbol(grid.frequency(i));
        if !s.is_finite() {
            return Err(CoreError::NonFiniteSymbol {
                name: m.name.clone(),
                omega_sq: grid.freq_norm_sq(i),
            });
        }
        *v = s;
        max_abs = max_abs.max(s.abs());
    }
    if !m.is_radial() {
        for i in 0..values.len() {
            let j = grid.conj_index(i);
            if j < i || grid.is_nyquist(i) {
                continue;
            }
            let defect = (values[i] - values[j]).abs();
            if defect > 1e-12 * max_abs.max(1.0) {
                return Err(CoreError::UnevenSymbol { name: m.name.clone(), defect });
            }
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid {
        TorusGrid::new_2d(8, 1.0).unwrap()
    }

    #[test]
    fn laplacian_kills_constants() {
        let g = grid();
        let mut f: Field<f64> = Field::zeros(g, "c");
        f.add_constant(7.0);
        let out = apply_multiplier(&MultiplierSpec::laplacian(), &f).unwrap();
        assert_eq!(out.l2_norm(), 0.0);
    }

    #[test]
    fn sigma_scales_single_mode() {
        let g = grid();
        let mut f: Field<f64> = Field::zeros(g, "m");
        let i = g.flat_of_mode([1, 1]).unwrap();
        f.coeffs_mut()[i] = Complex::new(1.0, 0.0);
        f.coeffs_mut()[g.conj_index(i)] = Complex::new(1.0, 0.0);
        let w2 = g.freq_norm_sq(i);
        let out = apply_multiplier(&MultiplierSpec::sigma(), &f).unwrap();
        assert!((out.coeffs()[i].re + 1.0 / (1.0 + w2)).abs() < 1e-15);
    }

    #[test]
    fn sigma_a_rejects_zero_shift() {
        let g = grid();
        let f: Field<f64> = Field::zeros(g, "z");
        let err = apply_multiplier(&MultiplierSpec::sigma_a(0.0), &f).unwrap_err();
        assert!(matches!(err, CoreError::NonFiniteSymbol { .. }), "got {err}");
    }

    #[test]
    fn uneven_custom_symbol_rejected() {
        let g = grid();
        let f: Field<f64> = Field::zeros(g, "z");
        let odd = MultiplierSpec::custom("odd", |w| w[0]);
        let err = apply_multiplier(&odd, &f).unwrap_err();
        assert!(matches!(err, CoreError::UnevenSymbol { .. }), "got {err}");
    }

    #[test]
    fn helmholtz_inverts_sigma_a_up_to_sign() {
        // (a - Lap) o sigma_a(D) = -Id on the lattice
        let g = grid();
        let a = 2.5;
        let mut f: Field<f64> = Field::zeros(g, "r");
        for i in 0..g.modes() {
            if g.is_nyquist(i) {
                continue;
            }
            let j = g.conj_index(i);
            if j < i {
                continue;
            }
            let re = ((i * 2654435761usize) % 1000) as f64 / 500.0 - 1.0;
            let im = if j == i { 0.0 } else { ((i * 40503) % 1000) as f64 / 500.0 - 1.0 };
            f.coeffs_mut()[i] = Complex::new(re, im);
            f.coeffs_mut()[j] = Complex::new(re, -im);
        }
        let sf = apply_multiplier(&MultiplierSpec::sigma_a(a), &f).unwrap();
        let lap = apply_multiplier(&MultiplierSpec::laplacian(), &sf).unwrap();
        // (a - Lap) sf = a*sf - lap
        let mut res = sf.clone();
        res.scale(a);
        res.axpy(-1.0, &lap).unwrap();
        res.axpy(1.0, &f).unwrap(); // should be exactly zero: -Id f + f
        assert!(res.l2_norm() <= 1e-12 * f.l2_norm(), "defect {}", res.l2_norm());
    }
}
