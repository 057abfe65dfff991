use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use burgers_pinn::{InitialCondition, Precision};
use burgers_pinn_cli::config::RunManifest;
use burgers_pinn_cli::sweep::SweepMode;
use burgers_pinn_cli::{compare_files, format_error, oracle_field, output_dir, run, sweep, OUTPUT_ROOT_VAR};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "burgers-pinn", version, about = "Implicit-Euler PINN solver for the viscous Burgers equation")]
struct Cli {
    /// Arithmetic for training, overriding the configuration.
    #[arg(long, global = true)]
    precision: Option<Precision>,

    /// Root for output directories given relative or not at all.
    #[arg(long, global = true, env = OUTPUT_ROOT_VAR)]
    output_root: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every level of one configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a grid of configurations and tabulate the results.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        mode: SweepMode,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Write the analytical solution at time `t` as an `x,u` CSV.
    Oracle {
        #[arg(long)]
        problem: InitialCondition,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
        /// Viscosity (default: the problem's own).
        #[arg(long)]
        viscosity: Option<f64>,
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// Print the relative L2 error of field A against field B.
    Compare { a: PathBuf, b: PathBuf },
}

fn load(path: &Path, precision: Option<Precision>) -> Result<RunManifest> {
    let mut m = RunManifest::load(path)?;
    if let Some(p) = precision {
        m.solver.precision = p;
    }
    Ok(m)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let root = cli.output_root.as_deref();
    match cli.command {
        Command::Run { config, out } => {
            let manifest = load(&config, cli.precision)?;
            let dir = out.unwrap_or_else(|| output_dir(&manifest, &config, root));
            let report = run::run(&manifest, &dir)?;
            for (seed, records) in &report.runs {
                if let Some(last) = records.last() {
                    println!(
                        "seed {seed}: {} levels, t = {}, final loss {:e}{}",
                        records.len(),
                        last.t,
                        last.loss,
                        last.rel_error.map(|e| format!(", rel_error {e:e}")).unwrap_or_default()
                    );
                }
            }
            println!("results in {}", report.dir.display());
        }
        Command::Sweep {
            config,
            mode,
            out,
            workers,
        } => {
            let manifest = load(&config, cli.precision)?;
            let dir = out.unwrap_or_else(|| output_dir(&manifest, &config, root));
            let rows = sweep::sweep(&manifest, mode, &dir, workers)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!("{} cells, {failed} failed; table in {}", rows.len(), dir.join("table.csv").display());
        }
        Command::Oracle {
            problem,
            t,
            out,
            viscosity,
            points,
        } => {
            anyhow::ensure!(t >= 0.0, "time must be non-negative, got {t}");
            anyhow::ensure!(points >= 2, "need at least 2 points, got {points}");
            let nu = viscosity.unwrap_or_else(|| problem.default_viscosity());
            let field = oracle_field(problem, nu, t, points)?;
            if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            field.write_csv(&out)?;
        }
        Command::Compare { a, b } => {
            println!("{}", format_error(compare_files(&a, &b)?));
        }
    }
    Ok(())
}
