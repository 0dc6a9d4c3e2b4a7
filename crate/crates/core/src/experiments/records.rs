//! Per-run rows and experiment-level records with stable CSV/JSON emission.
//!
//! Rows are long-format: every observable of a run is a (key, value) pair
//! under the run's (seed, group, parameter) coordinates, so one schema fits
//! every driver and plotting needs no reshaping.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub seed: u64,
    /// Driver-defined grouping label (mollifier name, branch tag, ...).
    pub group: String,
    /// The swept abscissa: epsilon, box size, delta, or rank.
    pub parameter: f64,
    /// Named scalar observables in insertion order.
    pub values: Vec<(String, f64)>,
    pub wall_seconds: f64,
}

impl RunRow {
    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub config_hash: u64,
    pub rows: Vec<RunRow>,
    /// Aggregates derived from the rows, keyed by a stable name.
    pub summaries: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl ExperimentRecord {
    pub fn new(experiment: &str, config_hash: u64) -> Self {
        ExperimentRecord {
            experiment: experiment.to_string(),
            config_hash,
            rows: Vec::new(),
            summaries: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn push_row(
        &mut self,
        seed: u64,
        group: &str,
        parameter: f64,
        values: Vec<(String, f64)>,
        wall_seconds: f64,
    ) {
        self.rows.push(RunRow {
            seed,
            group: group.to_string(),
            parameter,
            values,
            wall_seconds,
        });
    }

    pub fn add_summary(&mut self, key: &str, value: f64) {
        self.summaries.push((key.to_string(), value));
    }

    pub fn summary(&self, key: &str) -> Option<f64> {
        self.summaries.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows of a given group, in insertion order.
    pub fn group_rows(&self, group: &str) -> Vec<&RunRow> {
        self.rows.iter().filter(|r| r.group == group).collect()
    }

    /// Every observable flattened to (seed, group, parameter, key, value).
    pub fn long_rows(&self) -> impl Iterator<Item = (u64, &str, f64, &str, f64)> {
        self.rows.iter().flat_map(|row| {
            row.values
                .iter()
                .map(move |(k, v)| (row.seed, row.group.as_str(), row.parameter, k.as_str(), *v))
        })
    }

    /// Bit-identical results under replay: same experiment, config hash,
    /// flattened rows, summaries, and warnings. Wall timing is measurement,
    /// not content, and is deliberately excluded.
    pub fn same_results(&self, other: &Self) -> bool {
        self.experiment == other.experiment
            && self.config_hash == other.config_hash
            && self.long_rows().eq(other.long_rows())
            && self.summaries == other.summaries
            && self.warnings == other.warnings
    }

    /// Long-format CSV with full-precision (round-trip) floats.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if self.is_empty() {
            return Err(CoreError::IncompleteRecord(format!(
                "experiment '{}' produced no rows",
                self.experiment
            )));
        }
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["experiment", "seed", "group", "parameter", "key", "value"])?;
        for (seed, group, parameter, key, value) in self.long_rows() {
            w.serialize((&self.experiment, seed, group, parameter, key, value))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
