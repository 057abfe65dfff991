//! On-disk formats written by the runner.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use burgers_pinn::field::format_sig;
use burgers_pinn::{Precision, TimeStepRecord};
use serde::Serialize;

pub const RECORDS_HEADER: &str = "k,t,epochs,loss,rel_error,wall_ms";

/// Shortest decimal that reads back to the same value in `precision`.
pub fn format_real(v: f64, precision: Precision) -> String {
    match precision {
        Precision::F32 => format!("{:e}", v as f32),
        Precision::F64 => format!("{v:e}"),
    }
}

/// Level time in plain decimal, as stored in the configured precision.
pub fn format_time(t: f64, precision: Precision) -> String {
    match precision {
        Precision::F32 => format!("{}", t as f32),
        Precision::F64 => format!("{t}"),
    }
}

pub fn record_row(rec: &TimeStepRecord, precision: Precision) -> String {
    format!(
        "{},{},{},{},{},{}",
        rec.step,
        format_time(rec.t, precision),
        rec.epochs,
        format_real(rec.loss, precision),
        rec.rel_error.map(|e| format!("{e:e}")).unwrap_or_default(),
        rec.wall_ms
    )
}

/// File name for the solution dump at time `t`.
pub fn solution_file_name(t: f64) -> String {
    format!("solution_t{}.csv", format_sig(t, 9))
}

/// `records.csv`, flushed after every row so an aborted run keeps what it
/// finished.
pub struct RecordsWriter {
    path: PathBuf,
    out: BufWriter<File>,
    precision: Precision,
}

impl RecordsWriter {
    pub fn create(path: &Path, precision: Precision) -> Result<Self> {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = RecordsWriter {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
            precision,
        };
        w.line(RECORDS_HEADER)?;
        Ok(w)
    }

    pub fn push(&mut self, rec: &TimeStepRecord) -> Result<()> {
        let row = record_row(rec, self.precision);
        self.line(&row)
    }

    fn line(&mut self, text: &str) -> Result<()> {
        writeln!(self.out, "{text}")
            .and_then(|_| self.out.flush())
            .with_context(|| format!("writing {}", self.path.display()))
    }
}

/// Parsed row of a `records.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordRow {
    pub k: usize,
    pub t: f64,
    pub epochs: usize,
    pub loss: f64,
    pub rel_error: Option<f64>,
    pub wall_ms: u64,
}

/// Reads a `records.csv`; reals are parsed in the precision they were
/// written in so they compare equal to the in-memory records.
pub fn read_records(path: &Path, precision: Precision) -> Result<Vec<RecordRow>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    anyhow::ensure!(
        lines.next() == Some(RECORDS_HEADER),
        "{}: missing `{RECORDS_HEADER}` header",
        path.display()
    );
    lines
        .enumerate()
        .map(|(i, line)| {
            let c: Vec<&str> = line.split(',').collect();
            anyhow::ensure!(c.len() == 6, "{}:{}: expected 6 columns", path.display(), i + 2);
            let bad = || anyhow::anyhow!("{}:{}: malformed row `{line}`", path.display(), i + 2);
            let real = |s: &str| -> Option<f64> {
                match precision {
                    Precision::F32 => s.parse::<f32>().ok().map(f64::from),
                    Precision::F64 => s.parse().ok(),
                }
            };
            Ok(RecordRow {
                k: c[0].parse().map_err(|_| bad())?,
                t: real(c[1]).ok_or_else(bad)?,
                epochs: c[2].parse().map_err(|_| bad())?,
                loss: real(c[3]).ok_or_else(bad)?,
                rel_error: match c[4] {
                    "" => None,
                    s => Some(s.parse().map_err(|_| bad())?),
                },
                wall_ms: c[5].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// `summary.csv`: per level, medians over repetitions.
pub fn summary_csv(runs: &[Vec<TimeStepRecord>], precision: Precision) -> String {
    let mut out = String::from("k,t,median_epochs,median_loss,median_rel_error,runs\n");
    let levels = runs.iter().map(Vec::len).max().unwrap_or(0);
    for k in 0..levels {
        let at: Vec<&TimeStepRecord> = runs.iter().filter_map(|r| r.get(k)).collect();
        let mut epochs: Vec<f64> = at.iter().map(|r| r.epochs as f64).collect();
        let mut loss: Vec<f64> = at.iter().map(|r| r.loss).collect();
        let mut rel: Vec<f64> = at.iter().filter_map(|r| r.rel_error).collect();
        let rel = if rel.len() == at.len() { median(&mut rel) } else { None };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            k,
            format_time(at[0].t, precision),
            median(&mut epochs).unwrap(),
            format_real(median(&mut loss).unwrap(), precision),
            rel.map(|e| format!("{e:e}")).unwrap_or_default(),
            at.len()
        ));
    }
    out
}

/// Contents of `manifest.json`.
#[derive(Debug, Serialize)]
pub struct ManifestEcho<'a> {
    pub version: &'static str,
    pub problem: burgers_pinn::InitialCondition,
    pub seed: u64,
    pub repetition: usize,
    pub repetitions: usize,
    pub output_dir: &'a Path,
    pub output_times: &'a [crate::config::OutputTime],
    pub checkpoints: bool,
    pub eval_points: usize,
    pub solver: &'a burgers_pinn::SolverConfig,
    pub status: RunStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "state")]
pub enum RunStatus {
    Running,
    Completed { levels: usize },
    Failed { level: usize, error: String },
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
