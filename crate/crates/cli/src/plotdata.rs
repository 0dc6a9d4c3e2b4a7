//! Plot-ready data emission: long-format (x, y, group) CSV from experiment
//! records, plus physical-space heatmap dumps of fields. Everything here is
//! derived data; the record files stay the authority.

use anderson_core::experiments::ExperimentRecord;
use anderson_core::{CoreError, Field64, Result, Transformer64};
use std::collections::BTreeMap;
use std::path::Path;

/// How a record is projected onto (x, y, group) rows.
#[derive(Clone, Copy, Debug)]
pub enum PlotKind<'a> {
    /// x = row parameter, y = value, group = "{row group}/{key}".
    Curves,
    /// Tail study: empirical log-survival over the fitted window next to the
    /// fitted line, columns (x, log_survival, fit_value).
    TailFit,
    /// Per-(group, parameter) empirical CDF of one value key.
    Ecdf { key: &'a str },
}

pub fn emit_plotdata(record: &ExperimentRecord, kind: PlotKind, path: &Path) -> Result<()> {
    if record.is_empty() {
        return Err(CoreError::IncompleteRecord("empty record has nothing to plot".into()));
    }
    match kind {
        PlotKind::Curves => curves(record, path),
        PlotKind::TailFit => tail_fit(record, path),
        PlotKind::Ecdf { key } => ecdf(record, key, path),
    }
}

fn curves(record: &ExperimentRecord, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "group"])?;
    for (_, group, parameter, key, value) in record.long_rows() {
        w.serialize((parameter, value, format!("{group}/{key}")))?;
    }
    w.flush().map_err(CoreError::Io)?;
    Ok(())
}

/// Rebuilds the empirical left-tail log-survival on the window the fit used
/// and evaluates the fitted line beside it.
fn tail_fit(record: &ExperimentRecord, path: &Path) -> Result<()> {
    let need = |key: &str| {
        record.summary(key).ok_or_else(|| {
            CoreError::IncompleteRecord(format!("tail plot needs summary `{key}`"))
        })
    };
    let slope = need("tail_slope")?;
    let intercept = need("tail_intercept")?;
    let lo = need("tail_window_lo")?;
    let hi = need("tail_window_hi")?;

    let mut samples: Vec<f64> = record
        .rows
        .iter()
        .filter_map(|r| r.value("lambda1"))
        .collect();
    if samples.is_empty() {
        return Err(CoreError::IncompleteRecord("tail plot needs lambda1 rows".into()));
    }
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;

    let points = 12usize;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "log_survival", "fit_value"])?;
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let below = samples.partition_point(|&v| v <= x) as f64;
        if below == 0.0 {
            continue;
        }
        let log_surv = (below / n).ln();
        w.serialize((x, log_surv, slope * x + intercept))?;
    }
    w.flush().map_err(CoreError::Io)?;
    Ok(())
}

fn ecdf(record: &ExperimentRecord, key: &str, path: &Path) -> Result<()> {
    // BTreeMap keyed by the formatted label keeps group order stable across
    // replays regardless of row order.
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for row in &record.rows {
        if let Some(v) = row.value(key) {
            groups
                .entry(format!("{}/{}", row.group, row.parameter))
                .or_default()
                .push(v);
        }
    }
    if groups.is_empty() {
        return Err(CoreError::IncompleteRecord(format!(
            "no row carries the value key `{key}`"
        )));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "group"])?;
    for (label, mut values) in groups {
        values.sort_by(f64::total_cmp);
        let n = values.len() as f64;
        for (i, v) in values.iter().enumerate() {
            w.serialize((v, (i + 1) as f64 / n, &label))?;
        }
    }
    w.flush().map_err(CoreError::Io)?;
    Ok(())
}

/// Physical-space dump of a field as (x, y, group) rows: one group per
/// horizontal slice in 2D, a single "line" group in 1D.
pub fn emit_heatmap(tf: &mut Transformer64, field: &Field64, path: &Path) -> Result<()> {
    let grid = field.grid();
    let values = tf.to_physical(field)?;
    let n = grid.n();
    let step = grid.len() / n as f64;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "group"])?;
    match grid.dim() {
        1 => {
            for (i, v) in values.iter().enumerate() {
                w.serialize((i as f64 * step, v, "line"))?;
            }
        }
        2 => {
            for iy in 0..n {
                let label = format!("y={:.6}", iy as f64 * step);
                for ix in 0..n {
                    w.serialize((ix as f64 * step, values[iy * n + ix], &label))?;
                }
            }
        }
        d => {
            return Err(CoreError::DimensionMismatch { required: 2, actual: d });
        }
    }
    w.flush().map_err(CoreError::Io)?;
    Ok(())
}
