//! Brownian driving paths on [0, L]: forward sampling plus deterministic
//! dyadic refinement, so one seed names the same path at every step size.

use crate::error::CoreError;
use crate::rng::scalar_rng;
use crate::Result;
use rand::Rng;
use rand_distr::StandardNormal;

const PURPOSE_FORWARD: u64 = 0x1d00;
/// Bridge refinement level k draws from purpose PURPOSE_BRIDGE + k, so the
/// coarse values are untouched and every level is reproducible on its own.
const PURPOSE_BRIDGE: u64 = 0x1d40;

#[derive(Clone, Debug)]
pub struct BrownianPath {
    seed: u64,
    level: u32,
    h: f64,
    l: f64,
    /// B on the uniform grid {0, h, .., L}; values[0] = 0 exactly.
    values: Vec<f64>,
}

impl BrownianPath {
    /// Forward-samples B with i.i.d. N(0, h) increments. `h` must divide `l`.
    pub fn sample(l: f64, h: f64, seed: u64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(CoreError::InvalidArgument(format!("path length {l} must be positive")));
        }
        if !(h > 0.0) || h > l {
            return Err(CoreError::InvalidArgument(format!("step {h} outside (0, {l}]")));
        }
        let steps_f = l / h;
        let steps = steps_f.round();
        if (steps_f - steps).abs() > 1e-9 * steps {
            return Err(CoreError::InvalidArgument(format!(
                "step {h} does not divide length {l} (ratio {steps_f})"
            )));
        }
        let steps = steps as usize;
        let h = l / steps as f64;
        let mut rng = scalar_rng(seed, PURPOSE_FORWARD);
        let sd = h.sqrt();
        let mut values = Vec::with_capacity(steps + 1);
        values.push(0.0);
        let mut b = 0.0f64;
        for _ in 0..steps {
            let z: f64 = rng.sample(StandardNormal);
            b += sd * z;
            values.push(b);
        }
        Ok(BrownianPath { seed, level: 0, h, l, values })
    }

    /// The zero path (B = 0): the noiseless Dirichlet problem.
    pub fn zero(l: f64, h: f64) -> Result<Self> {
        let mut p = BrownianPath::sample(l, h, 0)?;
        for v in &mut p.values {
            *v = 0.0;
        }
        Ok(p)
    }

    /// Wraps externally supplied values (reimport, perturbation studies).
    /// `values` must start at 0 and have at least one step.
    pub fn from_values(l: f64, values: Vec<f64>, seed: u64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(CoreError::InvalidArgument(format!("path length {l} must be positive")));
        }
        if values.len() < 2 {
            return Err(CoreError::InvalidArgument(format!(
                "path needs at least 2 values, got {}",
                values.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(CoreError::InvalidArgument(format!(
                "B(0) must be 0, got {}",
                values[0]
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidArgument("non-finite path value".into()));
        }
        let h = l / (values.len() - 1) as f64;
        Ok(BrownianPath { seed, level: 0, h, l, values })
    }

    /// Halves the step by Brownian-bridge midpoints: B(mid) conditioned on
    /// the endpoints is N((B_i + B_{i+1})/2, h/4). The original values are
    /// kept bit-exactly, so refinements are nested.
    pub fn refine(&self) -> BrownianPath {
        let steps = self.values.len() - 1;
        let mut rng = scalar_rng(self.seed, PURPOSE_BRIDGE + (self.level + 1) as u64);
        let sd = (self.h / 4.0).sqrt();
        let mut values = Vec::with_capacity(2 * steps + 1);
        for i in 0..steps {
            let z: f64 = rng.sample(StandardNormal);
            values.push(self.values[i]);
            values.push(0.5 * (self.values[i] + self.values[i + 1]) + sd * z);
        }
        values.push(self.values[steps]);
        BrownianPath {
            seed: self.seed,
            level: self.level + 1,
            h: 0.5 * self.h,
            l: self.l,
            values,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> f64 {
        self.l
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Increment B(x_{i+1}) - B(x_i).
    pub fn increment(&self, i: usize) -> f64 {
        self.values[i + 1] - self.values[i]
    }
}
