//! `spe` — command-line driver for the short pulse equation toolkit.
//!
//! Exit codes: 0 success, 2 usage error (from argument parsing), 3 bad
//! configuration, 4 numerical failure, 5 I/O failure.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spe_cli::bench::{
    compare_schemes, convergence_study, exact_profiles, run_simulation, RunError,
};
use spe_cli::config::{parse_config, ConfigError, SimConfig};
use spe_cli::report::{write_compare, write_report, write_snapshot, write_table};
use spe_cli::verify::run_battery;

#[derive(Parser)]
#[command(
    name = "spe",
    version,
    about = "Structure-preserving integrators for the short pulse equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write snapshots plus a run report.
    Simulate {
        /// Path to a key=value configuration file.
        #[arg(long)]
        config: PathBuf,
    },
    /// Write exact pulse profiles at the configured snapshot times.
    Soliton {
        #[arg(long)]
        config: PathBuf,
    },
    /// Refinement study: halve dx and dt together for `levels` levels.
    Convergence {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run both schemes on the configured grid and compare.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the structural self-check battery.
    Verify {
        /// Seed for the battery's random sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum CliError {
    Config(ConfigError),
    Run(RunError),
    Io { path: PathBuf, source: std::io::Error },
    ChecksFailed,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 3,
            CliError::Run(e) if e.is_config_shaped() => 3,
            CliError::Run(_) | CliError::ChecksFailed => 4,
            CliError::Io { .. } => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration: {e}"),
            CliError::Run(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::ChecksFailed => write!(f, "one or more verification checks failed"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}
impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        CliError::Run(e)
    }
}

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn load_config(path: &Path) -> Result<SimConfig, CliError> {
    let text = fs::read_to_string(path).map_err(io_at(path))?;
    Ok(parse_config(&text)?)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_at(dir))
}

fn cmd_simulate(config: &Path) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    ensure_dir(&cfg.output_dir)?;
    for (requested, j, actual) in cfg.snapshot_steps() {
        println!("snapshot t={requested} -> step {j} (t={actual})");
    }
    let out = run_simulation(&cfg)?;
    for w in &out.warnings {
        println!("warning: {w}");
    }
    let steps = cfg.snapshot_steps();
    for (snap, &(_, j, _)) in out.snapshots.iter().zip(steps.iter()) {
        let path = cfg.output_dir.join(format!("snapshot_{j:06}.csv"));
        write_snapshot(&path, &out.xs, snap).map_err(io_at(&path))?;
    }
    let report_path = cfg.output_dir.join("report.txt");
    write_report(&report_path, &out.report).map_err(io_at(&report_path))?;
    for (t, sigma) in &out.report.sigma_by_time {
        println!("sigma(t={t}) = {sigma:.3e}");
    }
    for (name, drift) in &out.report.invariant_drift {
        println!("max relative drift of {name}: {drift:.3e}");
    }
    println!("wrote {} snapshots to {}", out.snapshots.len(), cfg.output_dir.display());
    Ok(())
}

fn cmd_soliton(config: &Path) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    ensure_dir(&cfg.output_dir)?;
    let (xs, snapshots) = exact_profiles(&cfg)?;
    for (k, snap) in snapshots.iter().enumerate() {
        let path = cfg.output_dir.join(format!("exact_{k:02}.csv"));
        write_snapshot(&path, &xs, snap).map_err(io_at(&path))?;
        println!("wrote exact profile at t={} to {}", snap.t, path.display());
    }
    Ok(())
}

fn cmd_convergence(config: &Path) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    ensure_dir(&cfg.output_dir)?;
    let table = convergence_study(&cfg);
    for row in &table.rows {
        match &row.note {
            Some(note) => println!("dx={:.3e} dt={:.3e}: failed ({note})", row.dx, row.dt),
            None => println!(
                "dx={:.3e} dt={:.3e}: sigma={:.3e}{}",
                row.dx,
                row.dt,
                row.sigma_final,
                row.measured_order
                    .map(|o| format!(" order={o:.2}"))
                    .unwrap_or_default()
            ),
        }
    }
    let path = cfg.output_dir.join("convergence.csv");
    write_table(&path, &table).map_err(io_at(&path))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_compare(config: &Path) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    ensure_dir(&cfg.output_dir)?;
    let rep = compare_schemes(&cfg)?;
    println!(
        "polysymplectic: sigma={:.3e} wall={:.3}s",
        rep.sigma_box, rep.wall_box
    );
    println!(
        "pseudospectral: sigma={:.3e} wall={:.3}s",
        rep.sigma_spectral, rep.wall_spectral
    );
    println!(
        "measured ratios at this scale: accuracy {:.2}, speed {:.2}",
        rep.accuracy_ratio, rep.speed_ratio
    );
    println!(
        "full-scale reference ratios (context only): accuracy {:.1}, speed {:.1}",
        rep.reference_accuracy_ratio_fullscale, rep.reference_speed_ratio_fullscale
    );
    let path = cfg.output_dir.join("compare.txt");
    write_compare(&path, &rep).map_err(io_at(&path))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify(seed: u64) -> Result<(), CliError> {
    let report = run_battery(seed);
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        println!("{status}: {} — {}", c.name, c.detail);
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate { config } => cmd_simulate(config),
        Command::Soliton { config } => cmd_soliton(config),
        Command::Convergence { config } => cmd_convergence(config),
        Command::Compare { config } => cmd_compare(config),
        Command::Verify { seed } => cmd_verify(*seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
