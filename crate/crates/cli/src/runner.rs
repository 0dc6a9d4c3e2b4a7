//! Argument surface and execution loop: parse, load and normalize config,
//! plan jobs, run them on a small worker pool with signal-aware shutdown,
//! and close the books in a manifest whose exit contract is 0 iff every
//! run succeeded.

use crate::commands::{canonical_experiment, plan_jobs};
use crate::error::CliError;
use crate::manifest::{unix_now, RunManifest, RunState, RunStatus};
use anderson_core::experiments::ExperimentConfig;
use anderson_core::CoreError;
use clap::{Args, Parser, Subcommand};
use signal_hook::consts::{SIGINT, SIGTERM};
use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

/// Fallback output directory when neither `--out` nor the environment
/// variable names one.
const DEFAULT_OUT: &str = "anderson-out";
/// Environment variable consulted for the default output directory.
const OUT_ENV: &str = "ANDERSON_OUT";

#[derive(Parser)]
#[command(
    name = "anderson",
    version,
    about = "Simulation driver for the 2D continuous Anderson hamiltonian"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args)]
pub struct Common {
    /// TOML experiment configuration.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Added to every seed in the config (wrapping).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed_offset: u64,

    /// Worker threads for independent runs.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Output directory; falls back to $ANDERSON_OUT, then ./anderson-out.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Validate the config and print the plan without writing anything.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Subcommand)]
pub enum Command {
    /// Sample one mollified white-noise realization per seed.
    Sample,
    /// Lowest eigenpairs of a single Hamiltonian realization.
    Spectrum,
    /// Renormalized eigenvalue convergence across a mollification sweep.
    RenormSweep,
    /// Noise-perturbation response of the low eigenvalues.
    Lipschitz,
    /// Exact-scaling identity check between two torus sizes.
    Scaling,
    /// Ground-state energy growth across a schedule of box sizes.
    Growth,
    /// Left-tail shape of the ground-state energy distribution.
    Tails,
    /// Inverse participation ratios across two box sizes.
    Localization,
    /// 1D Dirichlet spectrum: Riccati shooting against finite differences.
    Riccati1d,
    /// 1D ground-state statistics against the Gumbel limit.
    Mckean,
    /// Bony reconstruction and partition-of-unity checks on smooth fields.
    Paracheck,
}

impl Command {
    /// The subcommand as spelled on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Spectrum => "spectrum",
            Command::RenormSweep => "renorm-sweep",
            Command::Lipschitz => "lipschitz",
            Command::Scaling => "scaling",
            Command::Growth => "growth",
            Command::Tails => "tails",
            Command::Localization => "localization",
            Command::Riccati1d => "riccati1d",
            Command::Mckean => "mckean",
            Command::Paracheck => "paracheck",
        }
    }
}

/// Everything a job may touch while running.
pub struct JobCtx {
    pub out_dir: PathBuf,
}

type Work = Box<dyn FnOnce(&JobCtx, &mut Vec<PathBuf>) -> Result<(), CoreError> + Send>;

/// A deferred unit of work. The file list is threaded through the closure so
/// outputs written before a failure still reach the manifest.
pub struct Job {
    pub name: String,
    work: Work,
}

impl Job {
    pub fn new(
        name: String,
        work: impl FnOnce(&JobCtx, &mut Vec<PathBuf>) -> Result<(), CoreError> + Send + 'static,
    ) -> Self {
        Job { name, work: Box::new(work) }
    }

    fn run(self, ctx: &JobCtx) -> (Vec<PathBuf>, Result<(), CoreError>) {
        let mut files = Vec::new();
        let result = (self.work)(ctx, &mut files);
        (files, result)
    }
}

/// Full invocation: returns the process exit code, or an error that never
/// got as far as starting a run.
pub fn run(cli: Cli) -> Result<u8, CliError> {
    let sub = cli.command.name();
    let config_path = cli
        .common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config <FILE> is required".into()))?;
    if cli.common.threads == 0 {
        return Err(CliError::Usage("--threads must be >= 1".into()));
    }

    let mut cfg = ExperimentConfig::load(config_path)?;
    let canonical = canonical_experiment(sub);
    if cfg.experiment != canonical && cfg.experiment != sub {
        return Err(CliError::ExperimentMismatch {
            path: config_path.clone(),
            found: cfg.experiment.clone(),
            subcommand: sub.to_string(),
            expected: canonical.to_string(),
        });
    }
    // Normalize before hashing so both spellings replay to the same hash.
    cfg.experiment = canonical.to_string();
    if cli.common.seed_offset != 0 {
        for s in &mut cfg.seeds {
            *s = s.wrapping_add(cli.common.seed_offset);
        }
    }

    let jobs = plan_jobs(&cfg, canonical)?;
    let config_hash = cfg.config_hash();

    if cli.common.dry_run {
        let plan = serde_json::json!({
            "dry_run": true,
            "subcommand": sub,
            "config_hash": format!("{config_hash:016x}"),
            "runs_planned": jobs.len(),
        });
        println!("{plan}");
        return Ok(0);
    }

    let out_dir = resolve_out_dir(cli.common.out.as_deref());
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::Io {
        context: format!("create output directory {}", out_dir.display()),
        source: e,
    })?;

    let shutdown = Arc::new(AtomicBool::new(false));
    for sig in [SIGINT, SIGTERM] {
        signal_hook::flag::register(sig, Arc::clone(&shutdown)).map_err(|e| CliError::Io {
            context: format!("install handler for signal {sig}"),
            source: e,
        })?;
    }

    let mut manifest =
        RunManifest::new(sub, config_hash, cli.common.seed_offset, cli.common.threads);
    execute(jobs, cli.common.threads, &out_dir, &shutdown, &mut manifest)?;
    manifest.interrupted = shutdown.load(Ordering::SeqCst);
    manifest.finished_unix = unix_now();
    manifest.write(&out_dir.join("manifest.json"))?;

    Ok(u8::from(!manifest.all_succeeded()))
}

fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_OUT),
    }
}

struct Done {
    index: usize,
    status: RunStatus,
    files: Vec<PathBuf>,
}

/// Drains the queue on `threads` workers. A shutdown signal stops workers
/// from pulling new jobs; whatever is in flight finishes and is recorded,
/// the rest are marked cancelled. Manifest order follows plan order.
fn execute(
    jobs: Vec<Job>,
    threads: usize,
    out_dir: &Path,
    shutdown: &AtomicBool,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let workers = threads.min(jobs.len()).max(1);
    let queue = Mutex::new(jobs.into_iter().enumerate().collect::<VecDeque<_>>());
    let done = Mutex::new(Vec::<Done>::new());
    let ctx = JobCtx { out_dir: out_dir.to_path_buf() };

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if shutdown.load(Ordering::SeqCst) {
                    break;
                }
                let Some((index, job)) = queue.lock().unwrap().pop_front() else {
                    break;
                };
                let name = job.name.clone();
                let t0 = Instant::now();
                let (files, result) = job.run(&ctx);
                let wall_seconds = t0.elapsed().as_secs_f64();
                let status = match result {
                    Ok(()) => {
                        RunStatus { name, status: RunState::Ok, detail: String::new(), wall_seconds }
                    }
                    Err(e) => {
                        let detail = if files.is_empty() {
                            e.to_string()
                        } else {
                            format!("partial output kept: {e}")
                        };
                        RunStatus { name, status: RunState::Failed, detail, wall_seconds }
                    }
                };
                done.lock().unwrap().push(Done { index, status, files });
            });
        }
    });

    let mut done = done.into_inner().unwrap();
    for (index, job) in queue.into_inner().unwrap() {
        done.push(Done {
            index,
            status: RunStatus {
                name: job.name,
                status: RunState::Cancelled,
                detail: "shutdown before start".to_string(),
                wall_seconds: 0.0,
            },
            files: Vec::new(),
        });
    }
    done.sort_by_key(|d| d.index);

    for d in done {
        manifest.record_outputs(out_dir, &d.files)?;
        manifest.runs.push(d.status);
    }
    Ok(())
}
