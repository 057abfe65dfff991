//! The JSON run description and its validation.

use std::fmt;
use std::path::{Path, PathBuf};

use burgers_pinn::{Error as CoreError, SolverConfig};
use serde::{Deserialize, Serialize};

/// Everything `run` and `sweep` read from a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub solver: SolverConfig,
    /// Independent runs with seeds `seed, seed + 1, …`.
    #[serde(default = "one")]
    pub repetitions: usize,
    /// Output directory; relative paths are taken from the output root.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Times at which to dump `solution_t{t}.csv`; snapped to `k·h`.
    #[serde(default)]
    pub output_times: Vec<f64>,
    /// Save `checkpoints/net_k{k}.ckpt` after every level.
    #[serde(default)]
    pub checkpoints: bool,
    /// Size of the uniform grid for solution dumps and relative errors.
    #[serde(default = "default_eval_points")]
    pub eval_points: usize,
    #[serde(default)]
    pub sweep: SweepSpec,
}

/// Axes of a custom sweep; an empty axis keeps the configured value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub hidden_layers: Vec<usize>,
    pub hidden_units: Vec<usize>,
    pub samples: Vec<usize>,
    pub time_step: Vec<f64>,
    pub repetitions: usize,
    /// Worker threads; all available cores when unset.
    pub workers: Option<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            hidden_layers: Vec::new(),
            hidden_units: Vec::new(),
            samples: Vec::new(),
            time_step: Vec::new(),
            repetitions: 3,
            workers: None,
        }
    }
}

fn one() -> usize {
    1
}

fn default_eval_points() -> usize {
    1001
}

/// A configuration problem located in the source text.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}",
            self.path.display(),
            self.line,
            self.column,
            self.message
        )
    }
}

impl std::error::Error for ConfigError {}

/// An output time resolved to a level of the time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputTime {
    pub requested: f64,
    pub level: usize,
    pub t: f64,
}

impl RunManifest {
    pub fn parse(path: &Path, text: &str) -> Result<Self, ConfigError> {
        let manifest: RunManifest = serde_json::from_str(text).map_err(|e| {
            let full = e.to_string();
            let message = match full.rfind(" at line ") {
                Some(i) => full[..i].to_string(),
                None => full,
            };
            ConfigError {
                path: path.to_path_buf(),
                line: e.line(),
                column: e.column(),
                message,
            }
        })?;
        manifest.validate().map_err(|(key, message)| {
            let (line, column) = locate_key(text, key).unwrap_or((1, 1));
            ConfigError {
                path: path.to_path_buf(),
                line,
                column,
                message,
            }
        })?;
        Ok(manifest)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        Ok(Self::parse(path, &text)?)
    }

    /// Checks every field; on failure returns the offending key and a
    /// message.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        match self.solver.validate() {
            Ok(()) => {}
            Err(CoreError::Invalid { key, reason }) => return Err((key, format!("`{key}` {reason}"))),
            Err(e) => return Err(("solver", e.to_string())),
        }
        if self.repetitions == 0 {
            return Err(("repetitions", "`repetitions` must be at least 1".into()));
        }
        if self.eval_points < 2 {
            return Err(("eval_points", "`eval_points` must be at least 2".into()));
        }
        if self.sweep.repetitions == 0 {
            return Err(("repetitions", "sweep `repetitions` must be at least 1".into()));
        }
        if self.sweep.workers == Some(0) {
            return Err(("workers", "`workers` must be at least 1".into()));
        }
        self.output_levels().map(|_| ()).map_err(|m| ("output_times", m))
    }

    /// Output times on the level grid, with a warning for every time that
    /// had to be moved.
    pub fn output_levels(&self) -> Result<Vec<OutputTime>, String> {
        snap_times(&self.output_times, self.solver.time_step, self.solver.n_steps())
    }
}

pub fn snap_times(times: &[f64], dt: f64, n_steps: usize) -> Result<Vec<OutputTime>, String> {
    let mut out: Vec<OutputTime> = Vec::with_capacity(times.len());
    for &requested in times {
        if !requested.is_finite() || requested < 0.0 {
            return Err(format!("output time {requested} is not a non-negative number"));
        }
        let level = (requested / dt).round() as usize;
        if level > n_steps {
            return Err(format!(
                "output time {requested} lies beyond the final time {}",
                n_steps as f64 * dt
            ));
        }
        let t = level as f64 * dt;
        if (t - requested).abs() > 1e-9 * requested.abs().max(1.0) {
            log::warn!("output time {requested} is not on the time grid; using t = {t} (k = {level})");
        }
        if !out.iter().any(|o| o.level == level) {
            out.push(OutputTime { requested, level, t });
        }
    }
    out.sort_by_key(|o| o.level);
    Ok(out)
}

/// 1-based line and column of the first `"key"` in a JSON text.
fn locate_key(text: &str, key: &str) -> Option<(usize, usize)> {
    let needle = format!("\"{key}\"");
    text.lines()
        .enumerate()
        .find_map(|(i, line)| line.find(&needle).map(|c| (i + 1, c + 1)))
}
