//! One TOML-loadable parameterization shared by every experiment driver,
//! with a canonical content hash for replay bookkeeping.

use std::hash::Hasher;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::field::TorusGrid;
use crate::noise::MollifierKind;
use crate::Result;

/// Full parameterization of one experiment run. Drivers read the fields they
/// need and validate them on entry; unused fields are ignored so one config
/// file can feed several drivers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    /// Modes per axis on the base box.
    #[serde(default = "defaults::n")]
    pub n: usize,
    /// Base box side length.
    #[serde(default = "defaults::l")]
    pub l: f64,
    /// Mollification scales; sweeps read them as strictly decreasing.
    #[serde(default)]
    pub epsilons: Vec<f64>,
    /// Box sizes for drivers that grow the box, strictly increasing.
    #[serde(default)]
    pub l_schedule: Vec<f64>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "defaults::mollifiers")]
    pub mollifiers: Vec<String>,
    /// How many lowest eigenvalues each run resolves.
    #[serde(default = "defaults::eigen_count")]
    pub eigen_count: usize,
    /// Eigensolver residual target, relative to the local spectral scale.
    #[serde(default = "defaults::tol")]
    pub tol: f64,
    /// Perturbation sizes for the Lipschitz probe, strictly decreasing;
    /// a trailing 0 is allowed as the exact-degeneracy edge.
    #[serde(default)]
    pub deltas: Vec<f64>,
    /// Scaling ratio; the box grows by the integer factor 1/r.
    #[serde(default = "defaults::r")]
    pub r: f64,
    /// Modes per unit length for schedules that grow the box.
    #[serde(default = "defaults::n_per_unit")]
    pub n_per_unit: usize,
    /// Monte Carlo path count per level for the 1D ground-state statistics.
    #[serde(default = "defaults::paths")]
    pub paths: usize,
    /// Replace sampled noise by zero (calibration rows).
    #[serde(default)]
    pub zero_noise: bool,
    /// Ceiling on the estimated working set of a single run, in bytes.
    #[serde(default = "defaults::max_bytes")]
    pub max_bytes: u64,
    /// Where records are written; in-memory only when absent. Not part of
    /// the config hash.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

mod defaults {
    pub fn n() -> usize {
        64
    }
    pub fn l() -> f64 {
        1.0
    }
    pub fn mollifiers() -> Vec<String> {
        vec!["sharp".to_string()]
    }
    pub fn eigen_count() -> usize {
        1
    }
    pub fn tol() -> f64 {
        1e-8
    }
    pub fn r() -> f64 {
        0.5
    }
    pub fn n_per_unit() -> usize {
        32
    }
    pub fn paths() -> usize {
        256
    }
    pub fn max_bytes() -> u64 {
        2 << 30
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CoreError::Config {
            path: "<inline>".to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| CoreError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    /// FNV-1a over the canonical JSON form (keys sorted, `output` removed).
    /// Invariant under cosmetic reordering in the source TOML; sensitive to
    /// every semantically meaningful field.
    pub fn config_hash(&self) -> u64 {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("output");
        }
        let canonical = value.to_string();
        let mut h = Fnv1a::default();
        h.write(canonical.as_bytes());
        h.finish()
    }

    pub fn mollifier_kinds(&self) -> Result<Vec<MollifierKind>> {
        self.mollifiers
            .iter()
            .map(|name| match name.as_str() {
                "sharp" => Ok(MollifierKind::Sharp),
                "gaussian" => Ok(MollifierKind::Gaussian),
                "bump" => Ok(MollifierKind::Bump),
                other => Err(CoreError::InvalidArgument(format!(
                    "unknown mollifier '{other}' (expected sharp, gaussian, or bump)"
                ))),
            })
            .collect()
    }

    pub fn base_grid(&self) -> Result<TorusGrid> {
        TorusGrid::new_2d(self.n, self.l)
    }

    pub(crate) fn require_seeds(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(CoreError::InvalidArgument("seed list is empty".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(CoreError::InvalidArgument(format!(
                "seed list holds {} entries but only {} distinct values",
                self.seeds.len(),
                sorted.len()
            )));
        }
        Ok(())
    }

    pub(crate) fn require_epsilons_decreasing(&self) -> Result<()> {
        require_schedule("epsilons", &self.epsilons, Direction::Decreasing, 0.0)
    }

    pub(crate) fn require_l_schedule_increasing(&self, min: f64) -> Result<()> {
        require_schedule("l_schedule", &self.l_schedule, Direction::Increasing, min)
    }

    pub(crate) fn require_deltas_decreasing(&self) -> Result<()> {
        // deltas may end at exactly 0 (the degenerate edge); interior
        // entries must remain strictly positive and decreasing.
        require_schedule("deltas", &self.deltas, Direction::Decreasing, -f64::MIN_POSITIVE)
    }

    pub(crate) fn first_epsilon(&self) -> Result<f64> {
        self.epsilons.first().copied().ok_or_else(|| {
            CoreError::InvalidArgument("epsilons must hold the mollification scale".into())
        })
    }

    /// The box growth factor q = 1/r, required to be an integer >= 2 so the
    /// rescaled problem lands on a commensurate grid.
    pub(crate) fn integer_inverse_r(&self) -> Result<usize> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(CoreError::InvalidArgument(format!(
                "scaling ratio r = {} must lie in (0, 1)",
                self.r
            )));
        }
        let q = (1.0 / self.r).round();
        if (q * self.r - 1.0).abs() > 1e-12 || q < 2.0 {
            return Err(CoreError::InvalidArgument(format!(
                "1/r = {} is not an integer >= 2",
                1.0 / self.r
            )));
        }
        Ok(q as usize)
    }

    /// Working-set estimate for one eigensolve on an n x n grid: dealiased
    /// transform scratch plus a shift-inverted Krylov basis. Deliberately
    /// rough but monotone in n; the guard exists to refuse runs that would
    /// thrash, not to meter allocations.
    pub fn estimate_run_bytes(n: usize) -> u64 {
        let modes = (n * n) as u64;
        let dealias = (3 * n / 2) as u64;
        16 * (dealias * dealias * 24 + modes * 140)
    }

    /// Grids for a per-unit-resolution box schedule: n = n_per_unit * L must
    /// be an even integer at every L, and each level must fit the budget.
    pub(crate) fn schedule_grids(&self) -> Result<Vec<(f64, TorusGrid)>> {
        if self.n_per_unit < 8 || self.n_per_unit % 2 != 0 {
            return Err(CoreError::InvalidArgument(format!(
                "n_per_unit = {} must be even and >= 8",
                self.n_per_unit
            )));
        }
        let mut grids = Vec::new();
        for &l in &self.l_schedule {
            let n_exact = self.n_per_unit as f64 * l;
            let n = n_exact.round() as usize;
            if (n as f64 - n_exact).abs() > 1e-9 || n % 2 != 0 {
                return Err(CoreError::InvalidArgument(format!(
                    "L = {l} at {} modes per unit gives a non-even grid size {n_exact}",
                    self.n_per_unit
                )));
            }
            self.check_budget(n)?;
            grids.push((l, TorusGrid::new_2d(n, l)?));
        }
        Ok(grids)
    }

    /// Refuses a run whose estimated working set exceeds `max_bytes`.
    pub fn check_budget(&self, n: usize) -> Result<()> {
        let estimate = Self::estimate_run_bytes(n);
        if estimate > self.max_bytes {
            return Err(CoreError::BudgetExceeded(format!(
                "grid {n}x{n} needs an estimated {estimate} bytes, over the {} byte budget",
                self.max_bytes
            )));
        }
        Ok(())
    }
}

enum Direction {
    Increasing,
    Decreasing,
}

fn require_schedule(name: &str, xs: &[f64], dir: Direction, min: f64) -> Result<()> {
    if xs.is_empty() {
        return Err(CoreError::InvalidArgument(format!("{name} schedule is empty")));
    }
    for &x in xs {
        if !x.is_finite() || x < min {
            return Err(CoreError::InvalidArgument(format!(
                "{name} entry {x} is not finite and >= {min}"
            )));
        }
    }
    let monotone = xs.windows(2).all(|w| match dir {
        Direction::Increasing => w[0] < w[1],
        Direction::Decreasing => w[0] > w[1],
    });
    if !monotone {
        let want = match dir {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        };
        return Err(CoreError::InvalidArgument(format!(
            "{name} schedule {xs:?} is not strictly {want}"
        )));
    }
    Ok(())
}

/// 64-bit FNV-1a; dependency-free and stable across platforms.
struct Fnv1a(u64);

impl Default for Fnv1a {
    fn default() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }
}

impl Hasher for Fnv1a {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep_toml() -> &'static str {
        r#"
            experiment = "renorm_sweep"
            n = 32
            l = 1.0
            epsilons = [0.25, 0.125]
            seeds = [1, 2, 3]
            mollifiers = ["sharp", "gaussian"]
            eigen_count = 2
        "#
    }

    #[test]
    fn toml_round_trip_keeps_every_field() {
        let cfg = ExperimentConfig::from_toml_str(sweep_toml()).unwrap();
        assert_eq!(cfg.experiment, "renorm_sweep");
        assert_eq!(cfg.n, 32);
        assert_eq!(cfg.epsilons, vec![0.25, 0.125]);
        assert_eq!(cfg.eigen_count, 2);
        assert_eq!(cfg.tol, 1e-8, "tol should take its default");
        let text = toml::to_string(&cfg).unwrap();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn hash_ignores_key_order_and_output_path() {
        let a = ExperimentConfig::from_toml_str(sweep_toml()).unwrap();
        let reordered = r#"
            seeds = [1, 2, 3]
            eigen_count = 2
            mollifiers = ["sharp", "gaussian"]
            l = 1.0
            epsilons = [0.25, 0.125]
            n = 32
            experiment = "renorm_sweep"
        "#;
        let b = ExperimentConfig::from_toml_str(reordered).unwrap();
        assert_eq!(a.config_hash(), b.config_hash());

        let mut with_output = a.clone();
        with_output.output = Some(PathBuf::from("/tmp/somewhere.csv"));
        assert_eq!(a.config_hash(), with_output.config_hash(), "output is plumbing, not content");
    }

    #[test]
    fn hash_sees_semantic_changes() {
        let a = ExperimentConfig::from_toml_str(sweep_toml()).unwrap();
        let mut b = a.clone();
        b.seeds[2] = 4;
        assert_ne!(a.config_hash(), b.config_hash());
        let mut c = a.clone();
        c.tol = 1e-9;
        assert_ne!(a.config_hash(), c.config_hash());
    }

    #[test]
    fn schedule_validators_reject_misordered_input() {
        let mut cfg = ExperimentConfig::from_toml_str(sweep_toml()).unwrap();
        cfg.epsilons = vec![0.125, 0.25];
        assert!(cfg.require_epsilons_decreasing().is_err());
        cfg.epsilons.clear();
        assert!(cfg.require_epsilons_decreasing().is_err());

        cfg.seeds = vec![7, 7];
        assert!(cfg.require_seeds().is_err());

        cfg.l_schedule = vec![2.0, 2.0];
        assert!(cfg.require_l_schedule_increasing(1.0).is_err());

        cfg.r = 0.3;
        assert!(cfg.integer_inverse_r().is_err());
        cfg.r = 0.25;
        assert_eq!(cfg.integer_inverse_r().unwrap(), 4);
    }

    #[test]
    fn unknown_mollifier_is_refused() {
        let mut cfg = ExperimentConfig::from_toml_str(sweep_toml()).unwrap();
        cfg.mollifiers = vec!["boxcar".into()];
        let err = cfg.mollifier_kinds().unwrap_err();
        assert!(err.to_string().contains("boxcar"), "{err}");
    }

    #[test]
    fn budget_guard_scales_with_n() {
        let small = ExperimentConfig::estimate_run_bytes(64);
        let large = ExperimentConfig::estimate_run_bytes(1024);
        assert!(large > 100 * small, "estimate {small} -> {large} should grow superlinearly");
        let mut cfg = ExperimentConfig::from_toml_str(sweep_toml()).unwrap();
        cfg.max_bytes = small;
        assert!(cfg.check_budget(64).is_ok());
        assert!(matches!(cfg.check_budget(128), Err(CoreError::BudgetExceeded(_))));
    }
}
