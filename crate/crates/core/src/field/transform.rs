//! FFT engine: physical/spectral transforms and dealiased products.
//!
//! One `Transformer` per worker thread; it owns plans and scratch, so the
//! field types themselves stay immutable and freely shareable.

use super::{Field, TorusGrid};
use crate::error::CoreError;
use crate::scalar::Real;
use crate::Result;
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::Arc;

/// Smallest even pad size that makes the 3/2-rule product exact:
/// with inputs band-limited to |n_i| <= N/2 - 1, every alias image of a
/// product mode lands outside the kept band once M >= 3N/2.
pub fn dealias_size(n: usize) -> usize {
    let m = (3 * n).div_ceil(2);
    m + m % 2
}

pub struct Transformer<S: Real> {
    planner: FftPlanner<S>,
    plans: HashMap<(usize, bool), Arc<dyn Fft<S>>>,
    scratch: Vec<Complex<S>>,
    transpose: Vec<Complex<S>>,
}

impl<S: Real> Default for Transformer<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Real> Transformer<S> {
    pub fn new() -> Self {
        Transformer {
            planner: FftPlanner::new(),
            plans: HashMap::new(),
            scratch: Vec::new(),
            transpose: Vec::new(),
        }
    }

    fn plan(&mut self, len: usize, forward: bool) -> Arc<dyn Fft<S>> {
        self.plans
            .entry((len, forward))
            .or_insert_with(|| {
                if forward {
                    self.planner.plan_fft_forward(len)
                } else {
                    self.planner.plan_fft_inverse(len)
                }
            })
            .clone()
    }

    /// In-place unnormalized DFT over an N^dim buffer in row-major FFT order.
    fn dft(&mut self, data: &mut [Complex<S>], dim: usize, n: usize, forward: bool) {
        debug_assert_eq!(data.len(), n.pow(dim as u32));
        let fft = self.plan(n, forward);
        self.scratch.resize(fft.get_inplace_scratch_len(), Complex::default());
        // rows (contiguous): rustfft processes every n-chunk of the buffer
        fft.process_with_scratch(data, &mut self.scratch);
        if dim == 2 {
            transpose_square(data, &mut self.transpose, n);
            fft.process_with_scratch(data, &mut self.scratch);
            transpose_square(data, &mut self.transpose, n);
        }
    }

    /// Physical samples on the grid's own N^dim lattice.
    ///
    /// Rejects inputs whose Hermitian defect exceeds the precision's
    /// round-trip tolerance; residual imaginary parts below tolerance are
    /// truncated.
    pub fn to_physical(&mut self, f: &Field<S>) -> Result<Vec<S>> {
        let defect = f.hermitian_defect();
        if defect > S::FFT_TOL {
            return Err(CoreError::SymmetryViolation { defect, tol: S::FFT_TOL });
        }
        self.to_physical_padded(f, f.grid().n())
    }

    /// Physical samples of `f` on the M^dim lattice of the same box, M >= N.
    /// Used for dealiased products and sup-norm evaluation on refined grids.
    ///
    /// Symmetry is the caller's concern here (internal hot path); the public
    /// entry point is [`Transformer::to_physical`].
    pub fn to_physical_padded(&mut self, f: &Field<S>, m: usize) -> Result<Vec<S>> {
        let g = f.grid();
        let n = g.n();
        if m < n || m % 2 != 0 {
            return Err(CoreError::InvalidArgument(format!(
                "pad size {m} must be even and >= N = {n}"
            )));
        }
        let dim = g.dim();
        let mut buf = vec![Complex::default(); m.pow(dim as u32)];
        embed(f.coeffs(), &mut buf, g, m);
        self.dft(&mut buf, dim, m, false);
        let scale = S::of(g.len().powf(-(dim as f64) / 2.0));
        Ok(buf.into_iter().map(|c| c.re * scale).collect())
    }

    /// Field from physical samples on the grid's own lattice.
    /// The forward transform of real data is Hermitian up to roundoff; the
    /// Nyquist row is zeroed to keep the symmetry unambiguous.
    pub fn from_physical(
        &mut self,
        grid: TorusGrid,
        samples: &[S],
        label: impl Into<String>,
    ) -> Result<Field<S>> {
        if samples.len() != grid.modes() {
            return Err(CoreError::InvalidArgument(format!(
                "sample count {} does not match grid modes {}",
                samples.len(),
                grid.modes()
            )));
        }
        self.from_physical_truncated(grid, grid.n(), samples, label)
    }

    /// Field on `grid` from physical samples on the M^dim refinement of the
    /// same box: forward transform, then truncation to the representable
    /// non-Nyquist band (modes with any |n_i| >= N/2 are dropped).
    pub fn from_physical_truncated(
        &mut self,
        grid: TorusGrid,
        m: usize,
        samples: &[S],
        label: impl Into<String>,
    ) -> Result<Field<S>> {
        let dim = grid.dim();
        if samples.len() != m.pow(dim as u32) {
            return Err(CoreError::InvalidArgument(format!(
                "sample count {} does not match refined lattice {}^{}",
                samples.len(),
                m,
                dim
            )));
        }
        let mut buf: Vec<Complex<S>> =
            samples.iter().map(|&s| Complex::new(s, S::default())).collect();
        self.dft(&mut buf, dim, m, true);
        let scale = S::of(grid.len().powf(dim as f64 / 2.0) / (m as f64).powi(dim as i32));
        let mut coeffs = vec![Complex::default(); grid.modes()];
        extract(&buf, &mut coeffs, grid, m);
        for c in &mut coeffs {
            c.re *= scale;
            c.im *= scale;
        }
        // exact Hermitian symmetrization: the forward DFT of real samples is
        // symmetric up to roundoff; averaging conjugate pairs removes it
        for i in 0..coeffs.len() {
            let j = grid.conj_index(i);
            if j > i {
                let avg = (coeffs[i] + coeffs[j].conj()).scale(S::of(0.5));
                coeffs[i] = avg;
                coeffs[j] = avg.conj();
            } else if j == i {
                coeffs[i].im = S::default();
            }
        }
        Ok(Field::from_coeffs_unchecked(grid, coeffs, label))
    }

    /// Dealiased pointwise product: exact truncated convolution of the two
    /// coefficient arrays for any same-grid inputs.
    pub fn product(&mut self, f: &Field<S>, g: &Field<S>) -> Result<Field<S>> {
        f.check_same_grid(g)?;
        let grid = f.grid();
        let m = dealias_size(grid.n());
        let a = self.to_physical_padded(f, m)?;
        let b = self.to_physical_padded(g, m)?;
        let prod: Vec<S> = a.iter().zip(b.iter()).map(|(&x, &y)| x * y).collect();
        self.from_physical_truncated(grid, m, &prod, "product")
    }

    /// Sup of |f| sampled on the 3/2-refined physical lattice.
    pub fn sup_norm_refined(&mut self, f: &Field<S>) -> Result<f64> {
        let m = dealias_size(f.grid().n());
        let samples = self.to_physical_padded(f, m)?;
        Ok(samples.iter().fold(0.0f64, |acc, s| acc.max(s.as_f64().abs())))
    }
}

/// Copies representable non-Nyquist modes of an N-grid coefficient array into
/// an M-grid buffer (M >= N), FFT storage order, zero elsewhere.
fn embed<S: Real>(src: &[Complex<S>], dst: &mut [Complex<S>], grid: TorusGrid, m: usize) {
    let n = grid.n();
    let map = |i: usize| -> Option<usize> {
        // storage index i on the n-grid -> storage index on the m-grid
        let mode = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
        if mode == -(n as i64) / 2 {
            return None; // Nyquist row stays zero
        }
        Some(mode.rem_euclid(m as i64) as usize)
    };
    match grid.dim() {
        1 => {
            for (i, &c) in src.iter().enumerate() {
                if let Some(di) = map(i) {
                    dst[di] = c;
                }
            }
        }
        _ => {
            for iy in 0..n {
                let Some(dy) = map(iy) else { continue };
                for ix in 0..n {
                    let Some(dx) = map(ix) else { continue };
                    dst[dy * m + dx] = src[iy * n + ix];
                }
            }
        }
    }
}

/// Inverse of `embed`: pulls the N-band (minus Nyquist) out of an M-grid
/// buffer.
fn extract<S: Real>(src: &[Complex<S>], dst: &mut [Complex<S>], grid: TorusGrid, m: usize) {
    let n = grid.n();
    let map = |i: usize| -> Option<usize> {
        let mode = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
        if mode == -(n as i64) / 2 {
            return None;
        }
        Some(mode.rem_euclid(m as i64) as usize)
    };
    match grid.dim() {
        1 => {
            for (i, d) in dst.iter_mut().enumerate() {
                if let Some(si) = map(i) {
                    *d = src[si];
                }
            }
        }
        _ => {
            for iy in 0..n {
                let Some(sy) = map(iy) else { continue };
                for ix in 0..n {
                    let Some(sx) = map(ix) else { continue };
                    dst[iy * n + ix] = src[sy * m + sx];
                }
            }
        }
    }
}

/// Cache-blocked in-place square transpose via a scratch buffer.
fn transpose_square<S: Real>(data: &mut [Complex<S>], scratch: &mut Vec<Complex<S>>, n: usize) {
    const BLOCK: usize = 32;
    scratch.clear();
    scratch.resize(n * n, Complex::default());
    for by in (0..n).step_by(BLOCK) {
        for bx in (0..n).step_by(BLOCK) {
            for y in by..(by + BLOCK).min(n) {
                for x in bx..(bx + BLOCK).min(n) {
                    scratch[x * n + y] = data[y * n + x];
                }
            }
        }
    }
    data.copy_from_slice(scratch);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dealias_size_is_even_and_large_enough() {
        for n in [4usize, 6, 8, 10, 64, 256] {
            let m = dealias_size(n);
            assert!(m % 2 == 0 && 2 * m >= 3 * n, "n={n} m={m}");
        }
    }

    #[test]
    fn constant_field_samples() {
        let g = TorusGrid::new_2d(8, 2.0).unwrap();
        let mut f: Field<f64> = Field::zeros(g, "c");
        f.add_constant(1.5);
        let mut tf = Transformer::new();
        let s = tf.to_physical(&f).unwrap();
        for &v in &s {
            assert!((v - 1.5).abs() < 1e-13, "sample {v}");
        }
    }

    #[test]
    fn cosine_mode_sampled_exactly() {
        // f = e_k + e_{-k} with amplitude 1 => 2*L^{-1}*cos(2*pi*<k,x>/L) in 2D
        let g = TorusGrid::new_2d(8, 1.0).unwrap();
        let mut f: Field<f64> = Field::zeros(g, "cos");
        let i = g.flat_of_mode([2, 1]).unwrap();
        f.coeffs_mut()[i] = Complex::new(1.0, 0.0);
        f.coeffs_mut()[g.conj_index(i)] = Complex::new(1.0, 0.0);
        let mut tf = Transformer::new();
        let s = tf.to_physical(&f).unwrap();
        let h = g.spacing();
        for iy in 0..8 {
            for ix in 0..8 {
                let x = [ix as f64 * h, iy as f64 * h];
                let phase = 2.0 * std::f64::consts::PI * (2.0 * x[0] + 1.0 * x[1]);
                let want = 2.0 * phase.cos();
                let got = s[iy * 8 + ix];
                assert!((got - want).abs() < 1e-12, "({ix},{iy}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn roundtrip_physical_spectral() {
        let g = TorusGrid::new_2d(16, 3.0).unwrap();
        let mut tf = Transformer::new();
        // deterministic pseudo-random real samples
        let samples: Vec<f64> =
            (0..g.modes()).map(|i| ((i * 2654435761usize) % 1000) as f64 / 500.0 - 1.0).collect();
        let f = tf.from_physical(g, &samples, "s").unwrap();
        let back = tf.to_physical(&f).unwrap();
        let f2 = tf.from_physical(g, &back, "s2").unwrap();
        // coefficient round trip (samples are not band-limited data, but
        // coeffs -> samples -> coeffs is the identity on the representable band)
        let num: f64 = f
            .coeffs()
            .iter()
            .zip(f2.coeffs())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(num / f.l2_norm() < 1e-12, "roundtrip defect {num}");
    }

    #[test]
    fn product_of_cosines_has_exact_coefficients() {
        // cos*cos: 2cos(w1 x) * 2cos(w1 x) needs amplitude bookkeeping:
        // (e_1+e_{-1})^2 = e_2 + 2 e_0 + e_{-2}, basis scaling L^{-d/2} each
        let g = TorusGrid::new_2d(16, 1.0).unwrap();
        let mut f: Field<f64> = Field::zeros(g, "cos");
        let i = g.flat_of_mode([1, 0]).unwrap();
        f.coeffs_mut()[i] = Complex::new(1.0, 0.0);
        f.coeffs_mut()[g.conj_index(i)] = Complex::new(1.0, 0.0);
        let mut tf = Transformer::new();
        let p = tf.product(&f, &f).unwrap();
        // with L = 1, e_n products: e_a*e_b = L^{-1} e_{a+b} => coefficient
        // pattern [2, 1, 1] at modes 0, +-2
        let c0 = p.coeffs()[0];
        let c2 = p.coeffs()[g.flat_of_mode([2, 0]).unwrap()];
        assert!((c0.re - 2.0).abs() < 1e-13, "c0 = {c0}");
        assert!((c2.re - 1.0).abs() < 1e-13, "c2 = {c2}");
        let other: f64 = p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let m = g.mode(*i);
                !(m[1] == 0 && (m[0] == 0 || m[0] == 2 || m[0] == -2))
            })
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(other < 1e-13, "spurious content {other}");
    }

    #[test]
    fn product_commutes() {
        let g = TorusGrid::new_2d(8, 2.0).unwrap();
        let mut tf = Transformer::new();
        let mut mk = |seed: usize| {
            let samples: Vec<f64> = (0..g.modes())
                .map(|i| (((i + seed) * 2654435761usize) % 997) as f64 / 498.5 - 1.0)
                .collect();
            tf.from_physical(g, &samples, "r").unwrap()
        };
        let f = mk(1);
        let h = mk(2);
        let fg = tf.product(&f, &h).unwrap();
        let gf = tf.product(&h, &f).unwrap();
        let diff: f64 =
            fg.coeffs().iter().zip(gf.coeffs()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        assert!(diff.sqrt() < 1e-14 * fg.l2_norm().max(1.0));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let g1 = TorusGrid::new_2d(8, 1.0).unwrap();
        let g2 = TorusGrid::new_2d(8, 2.0).unwrap();
        let f: Field<f64> = Field::zeros(g1, "a");
        let h: Field<f64> = Field::zeros(g2, "b");
        let mut tf = Transformer::new();
        assert!(matches!(tf.product(&f, &h), Err(CoreError::GridMismatch(..))));
    }

    #[test]
    fn f32_lane_roundtrips_at_its_own_tolerance() {
        let g = TorusGrid::new_2d(8, 1.0).unwrap();
        let mut tf: Transformer<f32> = Transformer::new();
        let samples: Vec<f32> =
            (0..g.modes()).map(|i| ((i * 37) % 100) as f32 / 50.0 - 1.0).collect();
        let f = tf.from_physical(g, &samples, "s").unwrap();
        let back = tf.to_physical(&f).unwrap();
        let f2 = tf.from_physical(g, &back, "s2").unwrap();
        let num: f64 = f
            .coeffs()
            .iter()
            .zip(f2.coeffs())
            .map(|(a, b)| ((a - b).norm_sqr()) as f64)
            .sum::<f64>()
            .sqrt();
        assert!(num / f.l2_norm() < 1e-5, "f32 roundtrip defect {num}");
    }
}
