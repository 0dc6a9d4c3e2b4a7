//! Periodic white noise, mollification, the renormalization constant, and
//! the enhanced noise Xi = (xi_eps, Xi2_eps).
//!
//! The renormalization constant is always the exact lattice sum
//! c_eps = L^-2 sum_k theta(eps|omega_k|)^2 / (1 + |omega_k|^2),
//! never the asymptotic expansion; the log-slope 1/(2 pi) is a test target
//! only. The k = 0 term (value 1/L^2) is included.

use crate::error::CoreError;
use crate::field::{apply_multiplier, Field, MultiplierSpec, TorusGrid, Transformer};
use crate::paracalc::{resonant, smooth_step, DyadicPartition};
use crate::rng::mode_gaussians;
use crate::Result;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MollifierKind {
    /// 1 for t <= 1, 0 beyond: matches the lattice sum exactly and maximizes
    /// the resolvable epsilon range; the default.
    Sharp,
    /// exp(-t^2): rapid decay, support bound where it falls under 1e-12.
    Gaussian,
    /// Smooth compactly supported bump: 1 on [0, 3/2], 0 from 2 on.
    Bump,
}

impl MollifierKind {
    pub fn theta(self, t: f64) -> f64 {
        match self {
            MollifierKind::Sharp => {
                if t <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            MollifierKind::Gaussian => (-t * t).exp(),
            MollifierKind::Bump => smooth_step(0.5 * t),
        }
    }

    /// Radius beyond which theta(t) <= 1e-12.
    pub fn support_bound(self) -> f64 {
        match self {
            MollifierKind::Sharp => 1.0,
            MollifierKind::Gaussian => 5.3,
            MollifierKind::Bump => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MollifierKind::Sharp => "sharp",
            MollifierKind::Gaussian => "gaussian",
            MollifierKind::Bump => "bump",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub kind: MollifierKind,
    epsilon: f64,
}

impl MollifierSpec {
    pub fn new(kind: MollifierKind, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(CoreError::InvalidArgument(format!(
                "mollifier epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(MollifierSpec { kind, epsilon })
    }

    pub fn sharp(epsilon: f64) -> Result<Self> {
        Self::new(MollifierKind::Sharp, epsilon)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// theta(eps * |omega|).
    pub fn weight(&self, freq_norm: f64) -> f64 {
        self.kind.theta(self.epsilon * freq_norm)
    }

    /// The cutoff radius 1/eps must be <= N/(4L) so theta is mollifier-
    /// truncated, not grid-truncated; returns a warning message when it is
    /// not. Intentionally a diagnostic, never an error.
    pub fn resolution_warning(&self, grid: TorusGrid) -> Option<String> {
        let radius = 1.0 / self.epsilon;
        let allowed = grid.n() as f64 / (4.0 * grid.len());
        if radius > allowed {
            Some(format!(
                "mollifier cutoff radius 1/eps = {radius:.4} exceeds N/(4L) = {allowed:.4}; \
                 c_eps and Xi2 are grid-truncated at this resolution"
            ))
        } else {
            None
        }
    }
}

/// One draw of periodic white noise: the mode Gaussians g_k with
/// g_{-k} = conj(g_k), E|g_k|^2 = 1, g_0 real.
#[derive(Clone, Debug)]
pub struct NoiseRealization {
    seed: u64,
    grid: TorusGrid,
    gaussians: Vec<Complex<f64>>,
}

impl NoiseRealization {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn gaussians(&self) -> &[Complex<f64>] {
        &self.gaussians
    }

    /// The unmollified lattice noise as a field (coefficients g_k).
    pub fn raw_field(&self) -> Field<f64> {
        Field::from_coeffs_unchecked(
            self.grid,
            self.gaussians.clone(),
            format!("xi(seed={})", self.seed),
        )
    }

    /// ca * self + cb * other at the Gaussian level. The result keeps the
    /// Hermitian structure but not unit variance: downstream renormalization
    /// constants must be rescaled by ca^2 + cb^2 when both inputs are
    /// independent unit draws. Keeps self's seed as a label.
    pub fn linear_combination(&self, other: &Self, ca: f64, cb: f64) -> Result<Self> {
        if self.grid != other.grid {
            let (a, b) = (self.grid, other.grid);
            return Err(CoreError::GridMismatch(a.dim(), a.n(), a.len(), b.dim(), b.n(), b.len()));
        }
        let gaussians = self
            .gaussians
            .iter()
            .zip(&other.gaussians)
            .map(|(&a, &b)| a * ca + b * cb)
            .collect();
        Ok(NoiseRealization { seed: self.seed, grid: self.grid, gaussians })
    }
}

/// Deterministic given (grid, seed); mode-keyed RNG streams mean a coarser
/// grid's realization is the restriction of a finer grid's.
pub fn sample_white_noise(grid: TorusGrid, seed: u64) -> NoiseRealization {
    NoiseRealization { seed, grid, gaussians: mode_gaussians(grid, seed) }
}

/// xi_eps: coefficients theta(eps |omega_k|) g_k.
pub fn mollify(noise: &NoiseRealization, m: &MollifierSpec) -> Field<f64> {
    let grid = noise.grid;
    let coeffs = noise
        .gaussians
        .iter()
        .enumerate()
        .map(|(flat, &g)| g * m.weight(grid.freq_norm_sq(flat).sqrt()))
        .collect();
    Field::from_coeffs_unchecked(
        grid,
        coeffs,
        format!("xi_eps(theta={},eps={},seed={})", m.kind.name(), m.epsilon, noise.seed),
    )
}

/// The exact lattice sum c_eps = L^-2 sum_k theta(eps|omega_k|)^2/(1+|omega_k|^2)
/// over the grid's representable (Nyquist-free) modes, k = 0 included.
pub fn renorm_constant(grid: TorusGrid, m: &MollifierSpec) -> Result<f64> {
    if grid.dim() != 2 {
        return Err(CoreError::DimensionMismatch { required: 2, actual: grid.dim() });
    }
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for flat in 0..grid.modes() {
        if grid.is_nyquist(flat) {
            continue;
        }
        let w2 = grid.freq_norm_sq(flat);
        let th = m.weight(w2.sqrt());
        let term = th * th / (1.0 + w2);
        let y = term - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    Ok(acc / (grid.len() * grid.len()))
}

/// Xi2_eps = xi_eps o sigma(D) xi_eps + c_eps (the constant added on the
/// zero mode with the coefficient normalization c * L^{dim/2}).
pub fn resonant_enhancement(
    tf: &mut Transformer<f64>,
    xi_eps: &Field<f64>,
    c_eps: f64,
    part: &DyadicPartition,
) -> Result<Field<f64>> {
    let sig = apply_multiplier(&MultiplierSpec::sigma(), xi_eps)?;
    let mut out = resonant(tf, xi_eps, &sig, part)?;
    out.add_constant(c_eps);
    out.set_label(format!("Xi2[{}]", xi_eps.label()));
    Ok(out)
}

/// The enhancement Xi = (xi_eps, Xi2_eps) together with its construction
/// metadata; (seed, grid, mollifier) determine it bit-exactly.
#[derive(Clone, Debug)]
pub struct EnhancedNoise {
    pub xi_eps: Field<f64>,
    pub xi2_eps: Field<f64>,
    pub c_eps: f64,
    pub mollifier: MollifierSpec,
    pub seed: u64,
    /// Resolution-guard diagnostics; empty when the mollifier is fully
    /// resolved on the grid.
    pub warnings: Vec<String>,
}

pub fn enhance(
    tf: &mut Transformer<f64>,
    noise: &NoiseRealization,
    m: &MollifierSpec,
) -> Result<EnhancedNoise> {
    let warnings = m.resolution_warning(noise.grid).into_iter().collect();
    let xi_eps = mollify(noise, m);
    let c_eps = renorm_constant(noise.grid, m)?;
    let part = DyadicPartition::for_grid(&noise.grid);
    let xi2_eps = resonant_enhancement(tf, &xi_eps, c_eps, &part)?;
    Ok(EnhancedNoise { xi_eps, xi2_eps, c_eps, mollifier: *m, seed: noise.seed, warnings })
}
