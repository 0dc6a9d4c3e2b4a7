//! Periodic fields on [0,L]^dim stored as Fourier coefficients.
//!
//! Conventions (fixed once, used by every module):
//!
//! - Box [0,L]^dim with periodic boundary; N modes per dimension, N even.
//! - Mode indices n in [-N/2, N/2) per axis; the unpaired Nyquist row
//!   n_i = -N/2 is forced to zero on all fields.
//! - Frequencies omega_n = 2*pi*n/L; all multiplier symbols are functions of
//!   omega.
//! - Basis e_n(x) = L^{-dim/2} exp(2*pi*i <n,x>/L), orthonormal in L^2, so
//!   the coefficient l2 norm IS the L^2(torus) norm (Parseval).
//! - Pointwise products go through 3/2-rule zero padding, which makes every
//!   same-grid product an exact truncated convolution.

mod grid;
mod multiplier;
mod transform;

pub use grid::TorusGrid;
pub use multiplier::{apply_multiplier, MultiplierKind, MultiplierSpec};
pub use transform::{dealias_size, Transformer};

use crate::error::CoreError;
use crate::scalar::Real;
use crate::Result;
use num_complex::Complex;

/// A real scalar field stored as Fourier coefficients with Hermitian symmetry.
#[derive(Clone, Debug)]
pub struct Field<S: Real> {
    grid: TorusGrid,
    coeffs: Vec<Complex<S>>,
    label: String,
}

impl<S: Real> Field<S> {
    pub fn zeros(grid: TorusGrid, label: impl Into<String>) -> Self {
        Field { grid, coeffs: vec![Complex::default(); grid.modes()], label: label.into() }
    }

    /// Validating constructor: checks length, Hermitian symmetry, and a clean
    /// Nyquist row.
    pub fn from_coeffs(
        grid: TorusGrid,
        coeffs: Vec<Complex<S>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if coeffs.len() != grid.modes() {
            return Err(CoreError::InvalidArgument(format!(
                "coefficient length {} does not match grid modes {}",
                coeffs.len(),
                grid.modes()
            )));
        }
        let f = Field { grid, coeffs, label: label.into() };
        let defect = f.hermitian_defect();
        let tol = S::FFT_TOL;
        if defect > tol {
            return Err(CoreError::SymmetryViolation { defect, tol });
        }
        Ok(f)
    }

    /// Internal constructor for coefficients that are Hermitian by
    /// construction (multiplier outputs, products of real fields, ...).
    pub(crate) fn from_coeffs_unchecked(
        grid: TorusGrid,
        coeffs: Vec<Complex<S>>,
        label: impl Into<String>,
    ) -> Self {
        debug_assert_eq!(coeffs.len(), grid.modes());
        Field { grid, coeffs, label: label.into() }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex<S>] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex<S>] {
        &mut self.coeffs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    /// Relative Hermitian-symmetry defect:
    /// max_k |c(-k) - conj(c(k))| / max(1e-300, max_k |c(k)|),
    /// with Nyquist-row content counted as a defect.
    pub fn hermitian_defect(&self) -> f64 {
        let mut max_abs: f64 = 0.0;
        let mut max_defect: f64 = 0.0;
        for i in 0..self.coeffs.len() {
            let c = self.coeffs[i];
            let abs = (c.re.as_f64().powi(2) + c.im.as_f64().powi(2)).sqrt();
            max_abs = max_abs.max(abs);
            if self.grid.is_nyquist(i) {
                max_defect = max_defect.max(abs);
                continue;
            }
            let j = self.grid.conj_index(i);
            if j < i {
                continue; // each pair once
            }
            let d = self.coeffs[j] - c.conj();
            let dd = (d.re.as_f64().powi(2) + d.im.as_f64().powi(2)).sqrt();
            max_defect = max_defect.max(dd);
        }
        if max_abs == 0.0 {
            0.0
        } else {
            max_defect / max_abs
        }
    }

    /// L^2(torus) norm via Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.re.as_f64().powi(2) + c.im.as_f64().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Real L^2 inner product <f, g> (both fields real-valued).
    pub fn l2_inner(&self, other: &Field<S>) -> Result<f64> {
        self.check_same_grid(other)?;
        let mut acc = 0.0f64;
        for (a, b) in self.coeffs.iter().zip(other.coeffs.iter()) {
            // re(a * conj(b))
            acc += a.re.as_f64() * b.re.as_f64() + a.im.as_f64() * b.im.as_f64();
        }
        Ok(acc)
    }

    /// Spatial mean (1/L^dim) * integral of f.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re.as_f64() * self.grid.len().powf(-(self.grid.dim() as f64) / 2.0)
    }

    /// Adds the constant function `value` (coefficient bump on the zero mode).
    pub fn add_constant(&mut self, value: f64) {
        let d = self.grid.dim() as f64;
        self.coeffs[0].re += S::of(value * self.grid.len().powf(d / 2.0));
    }

    pub fn scale(&mut self, alpha: f64) {
        let a = S::of(alpha);
        for c in &mut self.coeffs {
            c.re *= a;
            c.im *= a;
        }
    }

    /// self += alpha * other.
    pub fn axpy(&mut self, alpha: f64, other: &Field<S>) -> Result<()> {
        self.check_same_grid(other)?;
        let a = S::of(alpha);
        for (c, o) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            c.re += a * o.re;
            c.im += a * o.im;
        }
        Ok(())
    }

    /// Partial derivative along `axis` as the Fourier multiplier i*omega_axis.
    /// The symbol is odd, but the output of differentiating a real field is
    /// still real, so this stays outside `MultiplierSpec` (whose contract is
    /// even symbols).
    pub fn partial_derivative(&self, axis: usize) -> Result<Field<S>> {
        if axis >= self.grid.dim() {
            return Err(CoreError::InvalidArgument(format!(
                "axis {axis} out of range for dim {}",
                self.grid.dim()
            )));
        }
        let mut out = vec![Complex::default(); self.coeffs.len()];
        for i in 0..self.coeffs.len() {
            if self.grid.is_nyquist(i) {
                continue;
            }
            let w = S::of(self.grid.frequency(i)[axis]);
            let c = self.coeffs[i];
            // i*w * (re + i*im) = -w*im + i*w*re
            out[i] = Complex::new(-w * c.im, w * c.re);
        }
        Ok(Field::from_coeffs_unchecked(
            self.grid,
            out,
            format!("d{}({})", axis, self.label),
        ))
    }

    pub(crate) fn check_same_grid(&self, other: &Field<S>) -> Result<()> {
        if self.grid != other.grid {
            let (a, b) = (self.grid, other.grid);
            return Err(CoreError::GridMismatch(a.dim(), a.n(), a.len(), b.dim(), b.n(), b.len()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid {
        TorusGrid::new_2d(8, 2.0).unwrap()
    }

    fn single_mode(g: TorusGrid, m: [i64; 2], amp: f64) -> Field<f64> {
        // e_m + e_{-m} pair so the field is real
        let mut f = Field::zeros(g, "mode");
        let i = g.flat_of_mode(m).unwrap();
        let j = g.conj_index(i);
        f.coeffs_mut()[i] = Complex::new(amp, 0.0);
        f.coeffs_mut()[j] = Complex::new(amp, 0.0);
        f
    }

    #[test]
    fn zero_field_has_zero_defect_and_norm() {
        let f: Field<f64> = Field::zeros(grid(), "z");
        assert_eq!(f.hermitian_defect(), 0.0);
        assert_eq!(f.l2_norm(), 0.0);
    }

    #[test]
    fn from_coeffs_rejects_broken_symmetry() {
        let g = grid();
        let mut c = vec![Complex::new(0.0f64, 0.0); g.modes()];
        c[g.flat_of_mode([1, 0]).unwrap()] = Complex::new(1.0, 0.0);
        // conjugate partner left at zero: defect 1 relative
        let err = Field::from_coeffs(g, c, "bad").unwrap_err();
        assert!(matches!(err, CoreError::SymmetryViolation { .. }), "got {err}");
    }

    #[test]
    fn from_coeffs_rejects_nyquist_content() {
        let g = grid();
        let mut c = vec![Complex::new(0.0f64, 0.0); g.modes()];
        c[g.flat_of_mode([-4, 0]).unwrap()] = Complex::new(1.0, 0.0);
        assert!(Field::from_coeffs(g, c, "nyq").is_err());
    }

    #[test]
    fn mean_matches_zero_mode_normalization() {
        let g = grid();
        let mut f: Field<f64> = Field::zeros(g, "c");
        f.add_constant(3.25);
        assert!((f.mean() - 3.25).abs() < 1e-14, "mean = {}", f.mean());
    }

    #[test]
    fn derivative_of_cosine_mode_is_real_and_scaled() {
        let g = grid();
        let f = single_mode(g, [1, 0], 0.5);
        let df = f.partial_derivative(0).unwrap();
        assert!(df.hermitian_defect() < 1e-15);
        // |omega| = 2*pi/L = pi for L = 2
        let i = g.flat_of_mode([1, 0]).unwrap();
        assert!((df.coeffs()[i].im - 0.5 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn inner_product_is_parseval_consistent() {
        let g = grid();
        let f = single_mode(g, [1, 2], 2.0);
        let h = single_mode(g, [1, 2], 0.25);
        // two conjugate modes contribute 2 * 2.0 * 0.25
        assert!((f.l2_inner(&h).unwrap() - 1.0).abs() < 1e-14);
    }
}
