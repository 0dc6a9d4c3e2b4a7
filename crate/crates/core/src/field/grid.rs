//! Discretization of the periodic box [0,L]^dim.

use crate::error::CoreError;
use crate::Result;

/// Grid geometry: dimension (1 or 2), modes per dimension N (even, >= 4),
/// side length L > 0.
///
/// Storage order is FFT order, row-major for dim 2: `flat = iy * N + ix`,
/// where storage index `i` in `0..N` carries mode `i` for `i < N/2` and
/// `i - N` otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
    len: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize, len: f64) -> Result<Self> {
        let reason = if dim != 1 && dim != 2 {
            Some("dim must be 1 or 2")
        } else if n % 2 != 0 {
            Some("N must be even")
        } else if n < 4 {
            Some("N must be >= 4")
        } else if !(len > 0.0) || !len.is_finite() {
            Some("L must be positive and finite")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(CoreError::InvalidGrid { dim, n, len, reason }),
            None => Ok(TorusGrid { dim, n, len }),
        }
    }

    pub fn new_1d(n: usize, len: f64) -> Result<Self> {
        Self::new(1, n, len)
    }

    pub fn new_2d(n: usize, len: f64) -> Result<Self> {
        Self::new(2, n, len)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    /// Total number of stored modes (= number of physical samples), N^dim.
    pub fn modes(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Physical sample spacing h = L/N.
    pub fn spacing(&self) -> f64 {
        self.len / self.n as f64
    }

    /// Quadrature weight per sample, h^dim.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    #[inline]
    fn wrap(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Integer mode vector of a flat storage index; second entry 0 in 1D.
    #[inline]
    pub fn mode(&self, flat: usize) -> [i64; 2] {
        match self.dim {
            1 => [self.wrap(flat), 0],
            _ => [self.wrap(flat % self.n), self.wrap(flat / self.n)],
        }
    }

    /// Frequency vector omega = 2*pi*mode/L; second entry 0 in 1D.
    #[inline]
    pub fn frequency(&self, flat: usize) -> [f64; 2] {
        let m = self.mode(flat);
        let s = 2.0 * std::f64::consts::PI / self.len;
        [s * m[0] as f64, s * m[1] as f64]
    }

    /// |omega|^2 at a flat index.
    #[inline]
    pub fn freq_norm_sq(&self, flat: usize) -> f64 {
        let w = self.frequency(flat);
        w[0] * w[0] + w[1] * w[1]
    }

    /// Largest |omega| over representable (non-Nyquist) lattice points.
    pub fn max_freq_norm(&self) -> f64 {
        let per_axis = 2.0 * std::f64::consts::PI / self.len * (self.n as f64 / 2.0 - 1.0);
        per_axis * (self.dim as f64).sqrt()
    }

    /// True if any component sits on the unpaired Nyquist row n_i = -N/2.
    #[inline]
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let m = self.mode(flat);
        let nyq = -(self.n as i64) / 2;
        m[0] == nyq || (self.dim == 2 && m[1] == nyq)
    }

    /// Flat index of -mode; the Nyquist row maps to itself.
    #[inline]
    pub fn conj_index(&self, flat: usize) -> usize {
        match self.dim {
            1 => (self.n - flat) % self.n,
            _ => {
                let ix = flat % self.n;
                let iy = flat / self.n;
                (self.n - iy) % self.n * self.n + (self.n - ix) % self.n
            }
        }
    }

    /// Flat index of an integer mode vector, if representable on this grid
    /// (Nyquist row included; fields keep it zero).
    pub fn flat_of_mode(&self, m: [i64; 2]) -> Option<usize> {
        let half = self.n as i64 / 2;
        let in_range = |v: i64| (-half..half).contains(&v);
        match self.dim {
            1 => {
                if !in_range(m[0]) || m[1] != 0 {
                    return None;
                }
                Some(m[0].rem_euclid(self.n as i64) as usize)
            }
            _ => {
                if !in_range(m[0]) || !in_range(m[1]) {
                    return None;
                }
                let ix = m[0].rem_euclid(self.n as i64) as usize;
                let iy = m[1].rem_euclid(self.n as i64) as usize;
                Some(iy * self.n + ix)
            }
        }
    }

    /// Same box, different mode count (used for dealiasing pads).
    pub fn with_modes(&self, n: usize) -> Result<TorusGrid> {
        TorusGrid::new(self.dim, n, self.len)
    }
}
