//! Grids of independent runs with one aggregate row per cell.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use burgers_pinn::{Architecture, SolverConfig, TimeStepRecord};
use rayon::prelude::*;

use crate::config::{snap_times, RunManifest};
use crate::run::{check_writable, repetition_dir, run_once, RunPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Initial-condition fits over depth, width and sample count.
    Table1,
    /// First time step over step size and sample count.
    Table2,
    /// Full runs over the axes listed in the configuration.
    Custom,
}

impl FromStr for SweepMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table1" => Ok(SweepMode::Table1),
            "table2" => Ok(SweepMode::Table2),
            "custom" => Ok(SweepMode::Custom),
            other => Err(format!("unknown sweep mode `{other}` (expected table1, table2 or custom)")),
        }
    }
}

/// One point of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub hidden_layers: usize,
    pub hidden_units: usize,
    pub samples: usize,
    pub time_step: f64,
}

impl Cell {
    fn dir_name(&self, index: usize) -> String {
        format!(
            "cell{index:03}_l{}_n{}_s{}_h{}",
            self.hidden_layers, self.hidden_units, self.samples, self.time_step
        )
    }

    fn apply(&self, base: &SolverConfig) -> Result<SolverConfig> {
        let mut c = base.clone();
        c.architecture = Architecture::new(self.hidden_layers, self.hidden_units)?;
        c.samples = self.samples;
        if c.time_step != self.time_step {
            c.time_step = self.time_step;
            // a pinned step count belongs to the old step size
            c.steps = None;
        }
        Ok(c)
    }
}

/// Grid for `mode`, taking unspecified axes from the manifest.
pub fn cells(mode: SweepMode, manifest: &RunManifest) -> Vec<Cell> {
    let c = &manifest.solver;
    let s = &manifest.sweep;
    let or = |v: &Vec<usize>, d: usize| if v.is_empty() { vec![d] } else { v.clone() };
    let (layers, units, samples, steps): (Vec<usize>, Vec<usize>, Vec<usize>, Vec<f64>) = match mode {
        SweepMode::Table1 => (vec![1, 2, 3, 4], vec![10, 20, 30, 40], vec![10, 100], vec![c.time_step]),
        SweepMode::Table2 => (
            vec![c.architecture.hidden_layers],
            vec![c.architecture.hidden_units],
            vec![10, 100, 1000],
            vec![1e-1, 1e-2, 1e-3],
        ),
        SweepMode::Custom => (
            or(&s.hidden_layers, c.architecture.hidden_layers),
            or(&s.hidden_units, c.architecture.hidden_units),
            or(&s.samples, c.samples),
            if s.time_step.is_empty() { vec![c.time_step] } else { s.time_step.clone() },
        ),
    };
    let mut out = Vec::new();
    // Table 2 lists step size as the outer axis
    if mode == SweepMode::Table2 {
        for &h in &steps {
            for &n in &samples {
                out.push(Cell {
                    hidden_layers: layers[0],
                    hidden_units: units[0],
                    samples: n,
                    time_step: h,
                });
            }
        }
        return out;
    }
    for &l in &layers {
        for &n in &units {
            for &ns in &samples {
                for &h in &steps {
                    out.push(Cell {
                        hidden_layers: l,
                        hidden_units: n,
                        samples: ns,
                        time_step: h,
                    });
                }
            }
        }
    }
    out
}

/// Aggregate of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: Cell,
    pub dir: PathBuf,
    pub repetitions: usize,
    pub converged: usize,
    pub mean_epochs: Option<f64>,
    pub mean_loss: Option<f64>,
    pub mean_rel_error: Option<f64>,
    /// First error among the repetitions, if any.
    pub error: Option<String>,
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn summarize(cell: Cell, dir: PathBuf, results: Vec<Result<Vec<TimeStepRecord>, String>>) -> CellSummary {
    let repetitions = results.len();
    let error = results.iter().find_map(|r| r.as_ref().err().cloned());
    let finals: Vec<TimeStepRecord> = results
        .into_iter()
        .filter_map(|r| r.ok().and_then(|recs| recs.last().cloned()))
        .collect();
    let complete = error.is_none();
    let rel = if finals.iter().all(|r| r.rel_error.is_some()) {
        mean(finals.iter().filter_map(|r| r.rel_error))
    } else {
        None
    };
    CellSummary {
        cell,
        dir,
        repetitions,
        converged: finals.iter().filter(|r| r.converged).count(),
        mean_epochs: mean(finals.iter().map(|r| r.epochs as f64)).filter(|_| complete),
        mean_loss: mean(finals.iter().map(|r| r.loss)).filter(|_| complete),
        mean_rel_error: rel.filter(|_| complete),
        error,
    }
}

/// Runs every cell and repetition on a pool of `workers` threads, writing
/// each run into its own directory and `table.csv` into `dir`.
pub fn sweep(manifest: &RunManifest, mode: SweepMode, dir: &Path, workers: Option<usize>) -> Result<Vec<CellSummary>> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    check_writable(dir)?;
    let grid = cells(mode, manifest);
    let reps = manifest.sweep.repetitions;
    let plan = RunPlan {
        output_times: Vec::new(),
        checkpoints: manifest.checkpoints,
        eval_points: manifest.eval_points,
        last_level: match mode {
            SweepMode::Table1 => Some(0),
            SweepMode::Table2 => Some(1),
            SweepMode::Custom => None,
        },
        repetition: 0,
        repetitions: reps,
    };

    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|c| (0..reps).map(move |r| (c, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.or(manifest.sweep.workers).unwrap_or(0))
        .build()
        .context("starting the worker pool")?;
    let results: Vec<Result<Vec<TimeStepRecord>, String>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, r)| {
                let cell = grid[c];
                let cell_dir = dir.join(cell.dir_name(c));
                let mut config = cell.apply(&manifest.solver).map_err(|e| e.to_string())?;
                config.seed = manifest.solver.seed.wrapping_add(r as u64);
                config.validate().map_err(|e| e.to_string())?;
                let output_times = match mode {
                    SweepMode::Custom => snap_times(&manifest.output_times, config.time_step, config.n_steps())?,
                    _ => Vec::new(),
                };
                let plan = RunPlan {
                    repetition: r,
                    output_times,
                    ..plan.clone()
                };
                run_once(&config, &plan, &repetition_dir(&cell_dir, config.seed)).map_err(|e| {
                    log::error!("cell {c} repetition {r}: {e:#}");
                    format!("{e:#}")
                })
            })
            .collect()
    });

    let mut results = results.into_iter();
    let summaries: Vec<CellSummary> = grid
        .iter()
        .enumerate()
        .map(|(c, &cell)| {
            let cell_results = results.by_ref().take(reps).collect();
            summarize(cell, dir.join(cell.dir_name(c)), cell_results)
        })
        .collect();
    let path = dir.join("table.csv");
    fs::write(&path, table_csv(&summaries)).with_context(|| format!("writing {}", path.display()))?;
    Ok(summaries)
}

pub const TABLE_HEADER: &str =
    "hidden_layers,hidden_units,samples,time_step,repetitions,converged,mean_epochs,mean_loss,mean_rel_error,status";

pub fn table_csv(rows: &[CellSummary]) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    let mut out = format!("{TABLE_HEADER}\n");
    for r in rows {
        let status = match &r.error {
            None => "ok".to_string(),
            // keep the row a single CSV record
            Some(e) => format!("failed: {}", e.replace([',', '\n', '\r'], ";")),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.cell.hidden_layers,
            r.cell.hidden_units,
            r.cell.samples,
            r.cell.time_step,
            r.repetitions,
            r.converged,
            r.mean_epochs.map(|x| x.to_string()).unwrap_or_default(),
            opt(r.mean_loss),
            opt(r.mean_rel_error),
            status
        );
    }
    out
}
