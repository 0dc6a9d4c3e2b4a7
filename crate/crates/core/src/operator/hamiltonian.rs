//! The discretized Hamiltonian H = -Laplacian + (potential + shift) as a
//! matrix-free symmetric operator on Nyquist-free coefficient space.
//!
//! Spectral Galerkin: the potential term is the dealiased (exact truncated
//! convolution) product, so the discrete operator is exactly symmetric and
//! no symmetrization fudge is needed.

use crate::error::CoreError;
use crate::field::{dealias_size, Field, TorusGrid, Transformer};
use crate::linalg::dense_symmetric_eigen;
use crate::noise::EnhancedNoise;
use crate::Result;
use nalgebra::DMatrix;

pub struct HamiltonianOp {
    grid: TorusGrid,
    potential: Field<f64>,
    shift: f64,
    /// potential samples on the 3/2-dealiased lattice, hoisted out of apply
    v_phys: Vec<f64>,
    tf: Transformer<f64>,
    applies: u64,
}

impl HamiltonianOp {
    /// H with an arbitrary real band-limited potential plus a constant shift.
    pub fn with_potential(potential: Field<f64>, shift: f64) -> Result<Self> {
        let grid = potential.grid();
        let mut tf = Transformer::new();
        let defect = potential.hermitian_defect();
        if defect > 1e-12 {
            return Err(CoreError::SymmetryViolation { defect, tol: 1e-12 });
        }
        let v_phys = tf.to_physical_padded(&potential, dealias_size(grid.n()))?;
        Ok(HamiltonianOp { grid, potential, shift, v_phys, tf, applies: 0 })
    }

    /// H_eps = -Laplacian + xi_eps + c_eps.
    pub fn from_enhanced(e: &EnhancedNoise) -> Result<Self> {
        Self::with_potential(e.xi_eps.clone(), e.c_eps)
    }

    pub fn zero_noise(grid: TorusGrid) -> Result<Self> {
        Self::with_potential(Field::zeros(grid, "zero potential"), 0.0)
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn potential(&self) -> &Field<f64> {
        &self.potential
    }

    /// Replace the constant shift, keeping the precomputed potential samples.
    pub fn set_shift(&mut self, shift: f64) {
        self.shift = shift;
    }

    /// Number of apply_H evaluations so far (2 size-M FFTs each).
    pub fn apply_count(&self) -> u64 {
        self.applies
    }

    pub fn transformer(&mut self) -> &mut Transformer<f64> {
        &mut self.tf
    }

    /// The multiplication part alone: P(V f) + shift * f, with P the band
    /// projection. This is what the resolvent iteration feeds to sigma_a.
    pub fn potential_product(&mut self, f: &Field<f64>) -> Result<Field<f64>> {
        f.check_same_grid(&self.potential)?;
        self.applies += 1;
        let m = dealias_size(self.grid.n());
        let samples = self.tf.to_physical_padded(f, m)?;
        let prod: Vec<f64> =
            samples.iter().zip(&self.v_phys).map(|(&a, &b)| a * b).collect();
        let mut out = self.tf.from_physical_truncated(self.grid, m, &prod, "Vf")?;
        for (flat, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c += f.coeffs()[flat] * self.shift;
        }
        Ok(out)
    }

    /// H f = -Laplacian f + P(V f) + shift * f.
    pub fn apply(&mut self, f: &Field<f64>) -> Result<Field<f64>> {
        let mut out = self.potential_product(f)?;
        out.set_label("Hf");
        for (flat, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c += f.coeffs()[flat] * self.grid.freq_norm_sq(flat);
        }
        Ok(out)
    }
}

/// Dense oracle: H assembled entry-by-entry in mode space (Laplacian symbol
/// on the diagonal, potential as the convolution kernel V_hat(n - m) L^-1),
/// eigensolved through the real 2K embedding of the complex Hermitian form.
/// Shares no code with the FFT apply path; small N only.
pub fn dense_spectrum(potential: &Field<f64>, shift: f64, count: usize) -> Result<Vec<f64>> {
    let grid = potential.grid();
    if grid.dim() != 2 {
        return Err(CoreError::DimensionMismatch { required: 2, actual: grid.dim() });
    }
    let band: Vec<usize> = (0..grid.modes()).filter(|&f| !grid.is_nyquist(f)).collect();
    let k = band.len();
    // convolution kernel carries e_a e_b = L^{-dim/2} e_{a+b}
    let scale = grid.len().powf(-(grid.dim() as f64) / 2.0);
    let mut re = DMatrix::<f64>::zeros(k, k);
    let mut im = DMatrix::<f64>::zeros(k, k);
    for (p, &fp) in band.iter().enumerate() {
        let mp = grid.mode(fp);
        for (q, &fq) in band.iter().enumerate() {
            let mq = grid.mode(fq);
            let d = [mp[0] - mq[0], mp[1] - mq[1]];
            let v = grid
                .flat_of_mode(d)
                .filter(|&fd| !grid.is_nyquist(fd))
                .map(|fd| potential.coeffs()[fd] * scale)
                .unwrap_or_default();
            re[(p, q)] = v.re;
            im[(p, q)] = v.im;
            if p == q {
                re[(p, q)] += grid.freq_norm_sq(fp) + shift;
            }
        }
    }
    // real embedding [[Re, -Im], [Im, Re]]: every eigenvalue of the complex
    // Hermitian matrix appears exactly twice
    let mut big = DMatrix::<f64>::zeros(2 * k, 2 * k);
    big.view_mut((0, 0), (k, k)).copy_from(&re);
    big.view_mut((k, k), (k, k)).copy_from(&re);
    big.view_mut((0, k), (k, k)).copy_from(&(-&im));
    big.view_mut((k, 0), (k, k)).copy_from(&im);
    let (eigs, _) = dense_symmetric_eigen(big);
    // collapse pairs; a mismatched pair means the embedding is broken
    let mut out = Vec::with_capacity(count);
    for pair in eigs.chunks_exact(2).take(count) {
        let gap = (pair[1] - pair[0]).abs();
        let size = pair[0].abs().max(1.0);
        if gap > 1e-7 * size {
            return Err(CoreError::InvalidArgument(format!(
                "dense embedding produced unpaired eigenvalues {} vs {}",
                pair[0], pair[1]
            )));
        }
        out.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(out)
}
