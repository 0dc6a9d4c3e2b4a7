//! One planner per subcommand: validates the effective config, then returns
//! deferred jobs that do the work and report the files they wrote. Planning
//! never touches the filesystem, so `--dry-run` is planning alone.

use crate::error::CliError;
use crate::plotdata::{emit_heatmap, emit_plotdata, PlotKind};
use crate::runner::{Job, JobCtx};
use anderson_core::anderson1d::{
    eigenvalues_by_shooting, fd_diagonalize, mckean_statistics, BrownianPath,
};
use anderson_core::experiments::{
    self, solve_lowest, ExperimentConfig, ExperimentRecord, NOISY_SHIFT,
};
use anderson_core::noise::{enhance, mollify, sample_white_noise, MollifierSpec};
use anderson_core::operator::HamiltonianOp;
use anderson_core::paracalc::{
    paraproduct_greater, paraproduct_less, resonant, synth_field, DyadicPartition,
};
use anderson_core::stats::derive_seed;
use anderson_core::{snapshot, CoreError, Field64, Transformer64};
use std::path::PathBuf;

/// Starting resolvent shift for noise-free potentials.
const SMOOTH_SHIFT: f64 = 8.0;
/// Seed-derivation tag reserved for CLI-orchestrated solves.
const CLI_TAG: u64 = 0xC11;

/// Canonical `experiment` value for each subcommand.
pub fn canonical_experiment(sub: &str) -> &'static str {
    match sub {
        "sample" => "sample",
        "spectrum" => "spectrum",
        "renorm-sweep" => "renorm_sweep",
        "lipschitz" => "lipschitz_probe",
        "scaling" => "scaling_identity_check",
        "growth" => "growth_study",
        "tails" => "tail_study",
        "localization" => "localization_diagnostic",
        "riccati1d" => "riccati1d",
        "mckean" => "mckean",
        "paracheck" => "paracheck",
        other => unreachable!("subcommand {other} is not in the clap surface"),
    }
}

/// True when the subcommand maps to a core experiment driver.
fn is_core_experiment(canonical: &str) -> bool {
    experiments::EXPERIMENTS.contains(&canonical)
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Core(CoreError::InvalidArgument(msg.into()))
}

fn require_seeds(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.seeds.is_empty() {
        return Err(invalid("seed list is empty"));
    }
    let mut sorted = cfg.seeds.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != cfg.seeds.len() {
        return Err(invalid(format!("seed list contains duplicates: {:?}", cfg.seeds)));
    }
    Ok(())
}

fn first_epsilon(cfg: &ExperimentConfig) -> Result<f64, CliError> {
    match cfg.epsilons.first() {
        Some(&e) if e > 0.0 && e.is_finite() => Ok(e),
        Some(&e) => Err(invalid(format!("epsilon {e} must be positive and finite"))),
        None => Err(invalid("epsilon list is empty")),
    }
}

fn first_mollifier(cfg: &ExperimentConfig) -> Result<MollifierSpec, CliError> {
    let kind = *cfg
        .mollifier_kinds()?
        .first()
        .ok_or_else(|| invalid("mollifier list is empty"))?;
    Ok(MollifierSpec::new(kind, first_epsilon(cfg)?)?)
}

/// The same input checks the jobs would hit, without running anything.
pub fn preflight(cfg: &ExperimentConfig, canonical: &str) -> Result<(), CliError> {
    if is_core_experiment(canonical) {
        return Ok(experiments::preflight(cfg)?);
    }
    match canonical {
        "sample" => {
            require_seeds(cfg)?;
            first_mollifier(cfg)?;
            cfg.base_grid()?;
            cfg.check_budget(cfg.n)?;
        }
        "spectrum" => {
            require_seeds(cfg)?;
            if cfg.eigen_count == 0 {
                return Err(invalid("eigen_count must be >= 1"));
            }
            if !cfg.zero_noise {
                first_mollifier(cfg)?;
            }
            cfg.base_grid()?;
            cfg.check_budget(cfg.n)?;
        }
        "riccati1d" => {
            require_seeds(cfg)?;
            if cfg.eigen_count == 0 {
                return Err(invalid("eigen_count must be >= 1"));
            }
            if cfg.n_per_unit < 2 {
                return Err(invalid(format!(
                    "n_per_unit = {} gives a step above half the unit length",
                    cfg.n_per_unit
                )));
            }
            if cfg.n < 64 {
                return Err(invalid(format!("FD grid n = {} below the minimum 64", cfg.n)));
            }
            if !(cfg.l > 0.0) || !cfg.l.is_finite() {
                return Err(invalid(format!("interval length l = {} must be positive", cfg.l)));
            }
        }
        "mckean" => {
            require_seeds(cfg)?;
            if cfg.l_schedule.is_empty() {
                return Err(invalid("l_schedule is empty"));
            }
            if cfg.l_schedule.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid(format!(
                    "l_schedule must be strictly increasing: {:?}",
                    cfg.l_schedule
                )));
            }
            if cfg.paths < 2 {
                return Err(invalid(format!("paths = {} cannot carry statistics", cfg.paths)));
            }
        }
        "paracheck" => {
            require_seeds(cfg)?;
            cfg.base_grid()?;
            cfg.check_budget(cfg.n)?;
        }
        other => return Err(invalid(format!("unknown subcommand {other:?}"))),
    }
    Ok(())
}

/// Builds the job list for a validated config. One job per independent unit
/// of work: per seed for `sample`, one per invocation otherwise.
pub fn plan_jobs(cfg: &ExperimentConfig, canonical: &str) -> Result<Vec<Job>, CliError> {
    preflight(cfg, canonical)?;
    if is_core_experiment(canonical) {
        return Ok(vec![experiment_job(cfg.clone())]);
    }
    Ok(match canonical {
        "sample" => cfg
            .seeds
            .iter()
            .map(|&seed| sample_job(cfg.clone(), seed))
            .collect(),
        "spectrum" => vec![spectrum_job(cfg.clone())],
        "riccati1d" => vec![riccati1d_job(cfg.clone())],
        "mckean" => vec![mckean_job(cfg.clone())],
        "paracheck" => vec![paracheck_job(cfg.clone())],
        other => return Err(invalid(format!("unknown subcommand {other:?}"))),
    })
}

/// Writes `record.json`, `record.csv`, and the kind-appropriate `plot.csv`,
/// pushing each file as soon as it exists so failures report partial output.
fn write_record_outputs(
    record: &ExperimentRecord,
    kind: PlotKind,
    ctx: &JobCtx,
    files: &mut Vec<PathBuf>,
) -> Result<(), CoreError> {
    record.write_json(&ctx.out_dir.join("record.json"))?;
    files.push(PathBuf::from("record.json"));
    record.write_csv(&ctx.out_dir.join("record.csv"))?;
    files.push(PathBuf::from("record.csv"));
    emit_plotdata(record, kind, &ctx.out_dir.join("plot.csv"))?;
    files.push(PathBuf::from("plot.csv"));
    Ok(())
}

fn plot_kind_for(experiment: &str) -> PlotKind<'static> {
    match experiment {
        "tail_study" => PlotKind::TailFit,
        "localization_diagnostic" => PlotKind::Ecdf { key: "ipr_area" },
        _ => PlotKind::Curves,
    }
}

fn experiment_job(cfg: ExperimentConfig) -> Job {
    let name = cfg.experiment.clone();
    Job::new(name.clone(), move |ctx, files| {
        let record = experiments::run_experiment(&cfg)?;
        write_record_outputs(&record, plot_kind_for(&name), ctx, files)
    })
}

fn sample_job(cfg: ExperimentConfig, seed: u64) -> Job {
    Job::new(format!("sample-seed{seed}"), move |ctx, files| {
        let grid = cfg.base_grid()?;
        let m = MollifierSpec::new(cfg.mollifier_kinds()?[0], cfg.epsilons[0])?;
        let noise = sample_white_noise(grid, seed);
        let xi = mollify(&noise, &m);
        let stem = format!("sample_seed{seed}");

        let fld = PathBuf::from(format!("{stem}.fld"));
        snapshot::write_field(&ctx.out_dir.join(&fld), &xi)?;
        files.push(fld);

        let mut tf = Transformer64::new();
        let csv = PathBuf::from(format!("{stem}.csv"));
        emit_heatmap(&mut tf, &xi, &ctx.out_dir.join(&csv))?;
        files.push(csv);
        Ok(())
    })
}

fn spectrum_job(cfg: ExperimentConfig) -> Job {
    Job::new("spectrum".to_string(), move |ctx, files| {
        let grid = cfg.base_grid()?;
        let seed = cfg.seeds[0];
        let mut tf = Transformer64::new();
        let (mut op, a0) = if cfg.zero_noise {
            (HamiltonianOp::with_potential(Field64::zeros(grid, "zero potential"), 0.0)?, SMOOTH_SHIFT)
        } else {
            let m = MollifierSpec::new(cfg.mollifier_kinds()?[0], cfg.epsilons[0])?;
            let enh = enhance(&mut tf, &sample_white_noise(grid, seed), &m)?;
            snapshot::write_enhanced(&ctx.out_dir.join("enhanced"), &enh)?;
            for ext in ["xi.fld", "xi2.fld", "json"] {
                files.push(PathBuf::from(format!("enhanced.{ext}")));
            }
            (HamiltonianOp::from_enhanced(&enh)?, NOISY_SHIFT)
        };

        let spec = solve_lowest(
            &mut op,
            cfg.eigen_count,
            cfg.tol,
            a0,
            derive_seed(seed, CLI_TAG, 0),
        )?;
        snapshot::write_spectrum(&ctx.out_dir.join("spectrum"), &spec, true)?;
        files.push(PathBuf::from("spectrum.json"));
        for k in 0..spec.eigenvectors.len() {
            files.push(PathBuf::from(format!("spectrum.v{k}.fld")));
        }

        emit_heatmap(
            &mut tf,
            &spec.eigenvectors[0],
            &ctx.out_dir.join("ground_state.csv"),
        )?;
        files.push(PathBuf::from("ground_state.csv"));
        Ok(())
    })
}

fn riccati1d_job(cfg: ExperimentConfig) -> Job {
    Job::new("riccati1d".to_string(), move |ctx, files| {
        let h = 1.0 / cfg.n_per_unit as f64;
        let k = cfg.eigen_count;
        let mut record = ExperimentRecord::new("riccati1d", cfg.config_hash());
        let mut gap_max = 0.0f64;
        for &seed in &cfg.seeds {
            let t0 = std::time::Instant::now();
            let path = if cfg.zero_noise {
                BrownianPath::zero(cfg.l, h)?
            } else {
                BrownianPath::sample(cfg.l, h, seed)?
            };
            let shoot = eigenvalues_by_shooting(&path, k, cfg.tol)?;
            let fd = fd_diagonalize(&path, cfg.n, k)?;
            let wall = t0.elapsed().as_secs_f64() / k as f64;
            for rank in 0..k {
                let gap = (shoot[rank] - fd[rank]).abs();
                gap_max = gap_max.max(gap);
                record.push_row(
                    seed,
                    "rank",
                    (rank + 1) as f64,
                    vec![
                        ("shooting".to_string(), shoot[rank]),
                        ("fd".to_string(), fd[rank]),
                        ("gap".to_string(), gap),
                    ],
                    wall,
                );
            }
        }
        record.add_summary("gap_max", gap_max);
        write_record_outputs(&record, PlotKind::Curves, ctx, files)
    })
}

fn mckean_job(cfg: ExperimentConfig) -> Job {
    Job::new("mckean".to_string(), move |ctx, files| {
        let t0 = std::time::Instant::now();
        let report = mckean_statistics(&cfg.l_schedule, cfg.paths, cfg.seeds[0])?;
        let wall = t0.elapsed().as_secs_f64();
        let mut record = ExperimentRecord::new("mckean", cfg.config_hash());
        let per_row = wall / (report.levels.len().max(1) * cfg.paths) as f64;
        for level in &report.levels {
            for (i, &lam) in level.ground_states.iter().enumerate() {
                let mut values = vec![("lambda1".to_string(), lam)];
                if let Some(centered) = &level.centered {
                    values.push(("centered".to_string(), centered[i]));
                }
                record.push_row(i as u64, "mckean", level.l, values, per_row);
            }
            if let Some(ks) = level.ks_distance {
                record.add_summary(&format!("ks/{}", level.l), ks);
            }
        }
        let trend = report.ks_trend();
        let decreasing = trend.len() >= 2 && trend.windows(2).all(|w| w[1].1 < w[0].1);
        record.add_summary("ks_decreasing", if decreasing { 1.0 } else { 0.0 });

        write_record_outputs(&record, PlotKind::Ecdf { key: "centered" }, ctx, files)?;

        // Reference curve for the ECDF plot: the Gumbel CDF on a fixed grid.
        let mut w = csv::Writer::from_path(ctx.out_dir.join("gumbel.csv"))
            .map_err(CoreError::Csv)?;
        w.write_record(["x", "y", "group"]).map_err(CoreError::Csv)?;
        for i in 0..=180 {
            let x = -3.0 + 9.0 * i as f64 / 180.0;
            w.serialize((x, anderson_core::stats::gumbel_cdf(x), "gumbel"))
                .map_err(CoreError::Csv)?;
        }
        w.flush().map_err(CoreError::Io)?;
        files.push(PathBuf::from("gumbel.csv"));
        Ok(())
    })
}

fn paracheck_job(cfg: ExperimentConfig) -> Job {
    Job::new("paracheck".to_string(), move |ctx, files| {
        let grid = cfg.base_grid()?;
        let part = DyadicPartition::for_grid(&grid);
        let mut tf = Transformer64::new();
        let mut record = ExperimentRecord::new("paracheck", cfg.config_hash());

        // Lattice partition-of-unity deviation, once per grid.
        let mut partition_dev = 0.0f64;
        for flat in 0..grid.modes() {
            let r = grid.freq_norm_sq(flat).sqrt();
            partition_dev = partition_dev.max((part.partition_sum(r) - 1.0).abs());
        }

        let mut recon_max = 0.0f64;
        for &seed in &cfg.seeds {
            let t0 = std::time::Instant::now();
            let f: Field64 = synth_field(grid, 1.0, derive_seed(seed, CLI_TAG, 1))?;
            let g: Field64 = synth_field(grid, 0.7, derive_seed(seed, CLI_TAG, 2))?;
            let mut recon = paraproduct_less(&mut tf, &f, &g, &part)?;
            recon.axpy(1.0, &resonant(&mut tf, &f, &g, &part)?)?;
            recon.axpy(1.0, &paraproduct_greater(&mut tf, &f, &g, &part)?)?;
            let product = tf.product(&f, &g)?;
            let scale = product.l2_norm();
            recon.axpy(-1.0, &product)?;
            let rel = recon.l2_norm() / scale;
            recon_max = recon_max.max(rel);
            record.push_row(
                seed,
                "bony",
                grid.n() as f64,
                vec![("recon_rel_error".to_string(), rel)],
                t0.elapsed().as_secs_f64(),
            );
        }
        record.add_summary("recon_rel_max", recon_max);
        record.add_summary("partition_max_dev", partition_dev);
        write_record_outputs(&record, PlotKind::Curves, ctx, files)
    })
}
