//! Single runs and repetitions of a configured solve.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use burgers_pinn::network::save_checkpoint;
use burgers_pinn::oracles::Reference;
use burgers_pinn::solver::Solver;
use burgers_pinn::{Precision, Real, SolverConfig, TimeStepRecord};

use crate::artifacts::{self, ManifestEcho, RecordsWriter, RunStatus};
use crate::config::{OutputTime, RunManifest};

/// What to produce besides `records.csv`.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub output_times: Vec<OutputTime>,
    pub checkpoints: bool,
    pub eval_points: usize,
    /// Last level to train; the configured number of steps when `None`.
    pub last_level: Option<usize>,
    pub repetition: usize,
    pub repetitions: usize,
}

impl RunPlan {
    pub fn from_manifest(m: &RunManifest) -> Result<Self> {
        Ok(RunPlan {
            output_times: m.output_levels().map_err(anyhow::Error::msg)?,
            checkpoints: m.checkpoints,
            eval_points: m.eval_points,
            last_level: None,
            repetition: 0,
            repetitions: m.repetitions,
        })
    }
}

/// A run that stopped before its last level.
#[derive(Debug)]
pub struct RunFailure {
    pub dir: PathBuf,
    pub level: usize,
    pub records: Vec<TimeStepRecord>,
    pub error: burgers_pinn::Error,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "training stopped at level {} ({}); partial results kept in {}",
            self.level,
            self.error,
            self.dir.display()
        )
    }
}

impl std::error::Error for RunFailure {}

/// Creates `dir` and proves it is writable by writing `manifest.json`.
fn prepare_dir(dir: &Path, echo: &ManifestEcho<'_>) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    artifacts::write_json(&dir.join("manifest.json"), echo)
        .with_context(|| format!("output directory {} is not writable", dir.display()))
}

/// Trains levels `0..=last` of one configuration, writing artifacts into
/// `dir` as it goes.
pub fn run_once(config: &SolverConfig, plan: &RunPlan, dir: &Path) -> Result<Vec<TimeStepRecord>> {
    let config = config.resolved();
    let mut echo = ManifestEcho {
        version: env!("CARGO_PKG_VERSION"),
        problem: config.problem,
        seed: config.seed,
        repetition: plan.repetition,
        repetitions: plan.repetitions,
        output_dir: dir,
        output_times: &plan.output_times,
        checkpoints: plan.checkpoints,
        eval_points: plan.eval_points,
        solver: &config,
        status: RunStatus::Running,
    };
    prepare_dir(dir, &echo)?;
    let result = match config.precision {
        Precision::F32 => train_levels::<f32>(&config, plan, dir),
        Precision::F64 => train_levels::<f64>(&config, plan, dir),
    };
    echo.status = match &result {
        Ok(records) => RunStatus::Completed {
            levels: records.len(),
        },
        Err(e) => match e.downcast_ref::<RunFailure>() {
            Some(f) => RunStatus::Failed {
                level: f.level,
                error: f.error.to_string(),
            },
            None => RunStatus::Failed {
                level: 0,
                error: format!("{e:#}"),
            },
        },
    };
    artifacts::write_json(&dir.join("manifest.json"), &echo)?;
    result
}

fn train_levels<T: Real>(config: &SolverConfig, plan: &RunPlan, dir: &Path) -> Result<Vec<TimeStepRecord>> {
    let reference = config.problem.reference(config.nu())?;
    let reference: Option<&dyn Reference> = reference.as_deref();
    let mut solver = Solver::<T>::new(config, reference)?;
    solver.set_eval_points(plan.eval_points)?;
    let mut writer = RecordsWriter::create(&dir.join("records.csv"), config.precision)?;
    let ckpt_dir = dir.join("checkpoints");
    if plan.checkpoints {
        fs::create_dir_all(&ckpt_dir).with_context(|| format!("creating {}", ckpt_dir.display()))?;
    }
    let last = plan.last_level.unwrap_or(config.n_steps()).min(config.n_steps());
    let mut records = Vec::with_capacity(last + 1);
    for k in 0..=last {
        let outcome = if k == 0 {
            solver.fit_initial()
        } else {
            solver.advance()
        };
        let rec = match outcome {
            Ok(rec) => rec,
            Err(error) => {
                return Err(RunFailure {
                    dir: dir.to_path_buf(),
                    level: k,
                    records,
                    error,
                }
                .into())
            }
        };
        log::info!(
            "seed {} k={} t={} epochs={} loss={:e}{}",
            config.seed,
            rec.step,
            rec.t,
            rec.epochs,
            rec.loss,
            rec.rel_error.map(|e| format!(" rel_error={e:e}")).unwrap_or_default()
        );
        writer.push(&rec)?;
        for out in plan.output_times.iter().filter(|o| o.level == k) {
            let mut field = solver.field();
            field.t = out.t;
            field.write_csv(&dir.join(artifacts::solution_file_name(out.t)))?;
        }
        if plan.checkpoints {
            save_checkpoint(solver.network(), &ckpt_dir.join(format!("net_k{k}.ckpt")))?;
        }
        records.push(rec);
    }
    Ok(records)
}

/// Output of [`run`]: per-repetition records in seed order.
#[derive(Debug)]
pub struct RunReport {
    pub dir: PathBuf,
    pub runs: Vec<(u64, Vec<TimeStepRecord>)>,
}

/// Directory of repetition `r` below the run directory.
pub fn repetition_dir(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("seed{seed}"))
}

/// Runs all repetitions of a manifest into `dir`. With more than one
/// repetition each seed gets its own subdirectory and `summary.csv` holds
/// per-level medians.
pub fn run(manifest: &RunManifest, dir: &Path) -> Result<RunReport> {
    let base = RunPlan::from_manifest(manifest)?;
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    check_writable(dir)?;
    let mut runs = Vec::with_capacity(manifest.repetitions);
    for r in 0..manifest.repetitions {
        let mut config = manifest.solver.clone();
        config.seed = manifest.solver.seed.wrapping_add(r as u64);
        let plan = RunPlan {
            repetition: r,
            ..base.clone()
        };
        let run_dir = if manifest.repetitions == 1 {
            dir.to_path_buf()
        } else {
            repetition_dir(dir, config.seed)
        };
        let records = run_once(&config, &plan, &run_dir)?;
        runs.push((config.seed, records));
    }
    if manifest.repetitions > 1 {
        let all: Vec<_> = runs.iter().map(|(_, r)| r.clone()).collect();
        let path = dir.join("summary.csv");
        fs::write(&path, artifacts::summary_csv(&all, manifest.solver.precision))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(RunReport {
        dir: dir.to_path_buf(),
        runs,
    })
}

pub fn check_writable(dir: &Path) -> Result<()> {
    let probe = dir.join(".write-test");
    fs::write(&probe, b"")
        .and_then(|_| fs::remove_file(&probe))
        .with_context(|| format!("output directory {} is not writable", dir.display()))
}
