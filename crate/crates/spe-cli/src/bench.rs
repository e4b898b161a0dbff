//! Run drivers and benchmarks: single simulations with accuracy/invariant
//! reporting, refinement studies, and a box-scheme vs. pseudo-spectral
//! head-to-head.
//!
//! Accuracy is always measured against the exact loop-regime pulse, so the
//! two schemes can be compared even on different grids. Wall-clock numbers
//! cover the integration loop only (setup and reference evaluation are
//! excluded) and are kept out of the byte-stable report files.

use std::fmt;
use std::time::Instant;

use spe_core::march::simulate;
use spe_core::metrics::{max_relative_drift, sigma_error};
use spe_core::soliton::{sakovich_profile, sakovich_u};
use spe_core::{FieldSnapshot, GridError, GridSpec, SimError, SolitonError, SolitonParams};

use crate::config::{Scheme, SimConfig};
use crate::spectral::{simulate_spectral, SpectralError};

/// Anything that can go wrong while running a configured simulation.
#[derive(Debug)]
pub enum RunError {
    Grid(GridError),
    Soliton(SolitonError),
    Sim(SimError),
    Spectral(SpectralError),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Grid(e) => write!(f, "grid setup failed: {e}"),
            RunError::Soliton(e) => write!(f, "pulse evaluation failed: {e}"),
            RunError::Sim(e) => write!(f, "box-scheme run failed: {e}"),
            RunError::Spectral(e) => write!(f, "pseudo-spectral run failed: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    /// True when the failure stems from an unusable configuration rather
    /// than from the numerics of an admissible run.
    pub fn is_config_shaped(&self) -> bool {
        matches!(self, RunError::Grid(_))
            || matches!(
                self,
                RunError::Soliton(SolitonError::InvalidShapeParameter { .. })
            )
            || matches!(self, RunError::Spectral(SpectralError::BadLength { .. }))
    }
}

impl From<GridError> for RunError {
    fn from(e: GridError) -> Self {
        RunError::Grid(e)
    }
}
impl From<SolitonError> for RunError {
    fn from(e: SolitonError) -> Self {
        RunError::Soliton(e)
    }
}
impl From<SimError> for RunError {
    fn from(e: SimError) -> Self {
        RunError::Sim(e)
    }
}
impl From<SpectralError> for RunError {
    fn from(e: SpectralError) -> Self {
        RunError::Spectral(e)
    }
}

/// Summary of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scheme: String,
    pub x_max: f64,
    pub n_x: usize,
    pub dt: f64,
    pub n_t: usize,
    /// `(snapshot time, sigma)` pairs in increasing time order, where sigma
    /// is the root-mean-square error against the exact pulse.
    pub sigma_by_time: Vec<(f64, f64)>,
    /// `(monitor name, max relative drift)` pairs in fixed order.
    pub invariant_drift: Vec<(String, f64)>,
    /// Integration-loop wall time; volatile, serialized separately.
    pub wall_seconds: f64,
}

/// Everything a run produces: node coordinates, snapshots, the report, and
/// any non-fatal warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub xs: Vec<f64>,
    pub snapshots: Vec<FieldSnapshot>,
    pub report: RunReport,
    pub warnings: Vec<String>,
}

/// Samples the exact pulse at the given node coordinates, centered on the
/// window `[0, x_max]`.
fn exact_pulse(
    params: &SolitonParams,
    xs: &[f64],
    x_max: f64,
    t: f64,
) -> Result<Vec<f64>, SolitonError> {
    xs.iter()
        .map(|&x| sakovich_u(params, x - 0.5 * x_max, t))
        .collect()
}

fn sigma_against_exact(
    params: &SolitonParams,
    xs: &[f64],
    x_max: f64,
    snapshot: &FieldSnapshot,
) -> Result<f64, SolitonError> {
    let exact = FieldSnapshot {
        t: snapshot.t,
        u: exact_pulse(params, xs, x_max, snapshot.t)?,
    };
    Ok(sigma_error(snapshot, &exact).expect("snapshot and reference share the grid"))
}

/// Runs the configured simulation and reports accuracy against the exact
/// pulse plus invariant drift. Wall time covers the integration call only.
pub fn run_simulation(cfg: &SimConfig) -> Result<RunOutput, RunError> {
    let params = SolitonParams::new(cfg.soliton_m)?;
    let n_t = cfg.n_t();
    let snapshot_js: Vec<usize> = cfg.snapshot_steps().iter().map(|&(_, j, _)| j).collect();

    let (xs, snapshots, drift, warnings, wall_seconds) = match cfg.scheme {
        Scheme::Polysymplectic => {
            let grid = GridSpec::new(cfg.x_max, cfg.n_x, cfg.dt, n_t)?;
            let xs: Vec<f64> = (0..=cfg.n_x).map(|i| grid.x(i)).collect();
            let u0 = sakovich_profile(&params, &grid, 0.0, cfg.boundary_tol)?;
            let start = Instant::now();
            let out = simulate(&grid, &u0.u, &snapshot_js, cfg.boundary_tol)?;
            let wall = start.elapsed().as_secs_f64();
            let drift = vec![
                (
                    "hamiltonian".to_string(),
                    max_relative_drift(&out.dw_integral),
                ),
                ("quadratic".to_string(), max_relative_drift(&out.quadratic)),
            ];
            (xs, out.snapshots, drift, Vec::new(), wall)
        }
        Scheme::Pseudospectral => {
            let dx = cfg.x_max / cfg.n_x as f64;
            let xs: Vec<f64> = (0..cfg.n_x).map(|j| j as f64 * dx).collect();
            let u0 = exact_pulse(&params, &xs, cfg.x_max, 0.0)?;
            let start = Instant::now();
            let run = simulate_spectral(&u0, cfg.x_max, cfg.dt, n_t, &snapshot_js, cfg.dealiasing)?;
            let wall = start.elapsed().as_secs_f64();
            let drift = vec![(
                "quadratic".to_string(),
                max_relative_drift(&run.quadratic),
            )];
            (xs, run.snapshots, drift, run.warnings, wall)
        }
    };

    let mut sigma_by_time = Vec::with_capacity(snapshots.len());
    for snap in &snapshots {
        sigma_by_time.push((snap.t, sigma_against_exact(&params, &xs, cfg.x_max, snap)?));
    }

    Ok(RunOutput {
        xs,
        snapshots,
        report: RunReport {
            scheme: cfg.scheme.to_string(),
            x_max: cfg.x_max,
            n_x: cfg.n_x,
            dt: cfg.dt,
            n_t,
            sigma_by_time,
            invariant_drift: drift,
            wall_seconds,
        },
        warnings,
    })
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub dx: f64,
    pub dt: f64,
    /// RMS error at the final time; NaN when the level failed to run.
    pub sigma_final: f64,
    /// Volatile, serialized separately from the table.
    pub wall_seconds: f64,
    /// `log2(sigma_prev / sigma_this)`; meaningful from the second
    /// successful level on, when each step size is halved between rows.
    pub measured_order: Option<f64>,
    /// Failure description for levels that did not run.
    pub note: Option<String>,
}

/// Rows of a refinement study, coarsest first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

fn sigma_final_of(cfg: &SimConfig) -> Result<(f64, f64), RunError> {
    let mut cfg = cfg.clone();
    cfg.snapshot_times = vec![cfg.t_final];
    let out = run_simulation(&cfg)?;
    let &(_, sigma) = out
        .report
        .sigma_by_time
        .last()
        .expect("final-time snapshot requested");
    Ok((sigma, out.report.wall_seconds))
}

fn push_level(table: &mut ConvergenceTable, cfg: &SimConfig) {
    let dx = cfg.x_max / cfg.n_x as f64;
    let row = match sigma_final_of(cfg) {
        Ok((sigma, wall)) => {
            let order = table.rows.last().and_then(|prev| {
                (prev.sigma_final.is_finite() && sigma > 0.0)
                    .then(|| (prev.sigma_final / sigma).log2())
            });
            ConvergenceRow {
                dx,
                dt: cfg.dt,
                sigma_final: sigma,
                wall_seconds: wall,
                measured_order: order,
                note: None,
            }
        }
        Err(e) => ConvergenceRow {
            dx,
            dt: cfg.dt,
            sigma_final: f64::NAN,
            wall_seconds: f64::NAN,
            measured_order: None,
            note: Some(e.to_string()),
        },
    };
    table.rows.push(row);
}

/// Richardson-style refinement study: starting from the configured grid,
/// halves `dx` and `dt` together for `cfg.levels` levels. A failing level
/// is recorded (NaN error plus a note) and the study continues.
pub fn convergence_study(cfg: &SimConfig) -> ConvergenceTable {
    let mut table = ConvergenceTable::default();
    for level in 0..cfg.levels {
        let mut c = cfg.clone();
        c.n_x = cfg.n_x << level;
        c.dt = cfg.dt / (1u64 << level) as f64;
        push_level(&mut table, &c);
    }
    table
}

/// Fixed-grid time-step sweep: holds `dx` and runs each `dt` in turn.
/// `measured_order` then tracks halvings of `dt` alone.
pub fn dt_sweep(cfg: &SimConfig, dts: &[f64]) -> ConvergenceTable {
    let mut table = ConvergenceTable::default();
    for &dt in dts {
        let mut c = cfg.clone();
        c.dt = dt;
        push_level(&mut table, &c);
    }
    table
}

/// Head-to-head result for both schemes on the same physical problem and
/// grid. The full-scale reference ratios bundled with the report are
/// informational context, not assertions about the desk-scale run.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub x_max: f64,
    pub n_x: usize,
    pub dt: f64,
    pub n_t: usize,
    pub sigma_box: f64,
    pub sigma_spectral: f64,
    /// `sigma_spectral / sigma_box`-style accuracy gap, box over spectral.
    pub accuracy_ratio: f64,
    /// Median-of-three integration wall time per scheme; volatile.
    pub wall_box: f64,
    pub wall_spectral: f64,
    pub speed_ratio: f64,
    /// Accuracy gap reported for the production-scale version of this
    /// benchmark; recorded for context only.
    pub reference_accuracy_ratio_fullscale: f64,
    /// Run-time gap reported for the production-scale version; context only.
    pub reference_speed_ratio_fullscale: f64,
}

fn median3(mut v: [f64; 3]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    v[1]
}

/// Runs both schemes on the configured grid to `t_final` and reports the
/// final-time accuracy and the median-of-three integration wall time.
pub fn compare_schemes(cfg: &SimConfig) -> Result<CompareReport, RunError> {
    let timed = |scheme: Scheme| -> Result<(f64, f64), RunError> {
        let mut c = cfg.clone();
        c.scheme = scheme;
        c.snapshot_times = vec![cfg.t_final];
        let mut sigma = f64::NAN;
        let mut walls = [0.0; 3];
        for w in &mut walls {
            let out = run_simulation(&c)?;
            sigma = out.report.sigma_by_time.last().expect("snapshot").1;
            *w = out.report.wall_seconds;
        }
        Ok((sigma, median3(walls)))
    };
    let (sigma_box, wall_box) = timed(Scheme::Polysymplectic)?;
    let (sigma_spectral, wall_spectral) = timed(Scheme::Pseudospectral)?;
    Ok(CompareReport {
        x_max: cfg.x_max,
        n_x: cfg.n_x,
        dt: cfg.dt,
        n_t: cfg.n_t(),
        sigma_box,
        sigma_spectral,
        accuracy_ratio: sigma_box / sigma_spectral,
        wall_box,
        wall_spectral,
        speed_ratio: wall_box / wall_spectral,
        reference_accuracy_ratio_fullscale: 10.0,
        reference_speed_ratio_fullscale: 2.5,
    })
}

/// Exact pulse profiles at the configured snapshot times, on the
/// box-scheme node layout (`n_x + 1` points including both edges).
pub fn exact_profiles(cfg: &SimConfig) -> Result<(Vec<f64>, Vec<FieldSnapshot>), RunError> {
    let params = SolitonParams::new(cfg.soliton_m)?;
    let dx = cfg.x_max / cfg.n_x as f64;
    let xs: Vec<f64> = (0..=cfg.n_x).map(|i| i as f64 * dx).collect();
    let mut snapshots = Vec::with_capacity(cfg.snapshot_times.len());
    for &t in &cfg.snapshot_times {
        snapshots.push(FieldSnapshot {
            t,
            u: exact_pulse(&params, &xs, cfg.x_max, t)?,
        });
    }
    Ok((xs, snapshots))
}

/// Invariant series of a box-scheme run, exposed for drift studies.
pub fn box_invariants(cfg: &SimConfig) -> Result<(Vec<f64>, Vec<f64>), RunError> {
    let params = SolitonParams::new(cfg.soliton_m)?;
    let grid = GridSpec::new(cfg.x_max, cfg.n_x, cfg.dt, cfg.n_t())?;
    let u0 = sakovich_profile(&params, &grid, 0.0, cfg.boundary_tol)?;
    let out = simulate(&grid, &u0.u, &[], cfg.boundary_tol)?;
    Ok((out.quadratic, out.dw_integral))
}
