//! Command-line front end for `burgers-pinn`: configured runs, parameter
//! sweeps, reference-solution export and field comparison.

pub mod artifacts;
pub mod config;
pub mod run;
pub mod sweep;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use burgers_pinn::field::uniform_grid;
use burgers_pinn::{rel_error, InitialCondition, SolutionField};
use rayon::prelude::*;

/// Environment variable naming the directory under which runs without an
/// explicit `output_dir` are written.
pub const OUTPUT_ROOT_VAR: &str = "BURGERS_PINN_OUT";

/// Where a run described by `config_path` writes: an absolute `output_dir`
/// as is, a relative one below the output root, otherwise a directory named
/// after the configuration file.
pub fn output_dir(manifest: &config::RunManifest, config_path: &Path, root: Option<&Path>) -> PathBuf {
    let root = root.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("runs"));
    match &manifest.output_dir {
        Some(d) if d.is_absolute() => d.clone(),
        Some(d) => root.join(d),
        None => root.join(
            config_path
                .file_stem()
                .map(|s| s.to_os_string())
                .unwrap_or_else(|| "run".into()),
        ),
    }
}

/// Samples the analytical solution of `problem` at time `t` on an
/// `points`-node uniform grid, filling the grid in parallel.
pub fn oracle_field(problem: InitialCondition, nu: f64, t: f64, points: usize) -> Result<SolutionField> {
    let reference = problem
        .reference(nu)?
        .with_context(|| format!("{problem} has no analytical solution"))?;
    let x = uniform_grid(points);
    let u = x
        .par_iter()
        .map(|&xi| reference.eval(t, xi))
        .collect::<burgers_pinn::Result<Vec<f64>>>()?;
    Ok(SolutionField::new(t, x, u)?)
}

/// `ε_rel` of field file `a` against field file `b`.
pub fn compare_files(a: &Path, b: &Path) -> Result<f64> {
    let fa = SolutionField::read_csv(a, 0.0)?;
    let fb = SolutionField::read_csv(b, 0.0)?;
    rel_error(&fa, &fb).with_context(|| format!("comparing {} with {}", a.display(), b.display()))
}

/// Fixed-point rendering with at least six decimals and at least six
/// significant digits.
pub fn format_error(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v:.6}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(6) as usize;
    format!("{v:.decimals$}")
}
