//! Deterministic output files.
//!
//! Numbers are printed with 17 significant digits (`{:.16e}`), enough for
//! an exact `f64` round trip, so identical runs produce byte-identical
//! files. Wall-clock times are volatile by nature; every writer that
//! reports them puts them in a sibling `<file>.timing` instead of the main
//! file, keeping the data files byte-stable.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use spe_core::FieldSnapshot;

use crate::bench::{CompareReport, ConvergenceTable, RunReport};

/// Shortest representation that round-trips any finite `f64` exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Path of the volatile sibling carrying a file's timing fields.
pub fn timing_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".timing");
    path.with_file_name(name)
}

fn write_atomically(path: &Path, contents: &str) -> io::Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(contents.as_bytes())?;
    file.flush()
}

/// Writes one field snapshot as CSV with header `x,u` and LF line endings.
pub fn write_snapshot(path: &Path, xs: &[f64], snapshot: &FieldSnapshot) -> io::Result<()> {
    debug_assert_eq!(xs.len(), snapshot.u.len(), "node/value count mismatch");
    let mut out = String::with_capacity(48 * (xs.len() + 1));
    out.push_str("x,u\n");
    for (&x, &u) in xs.iter().zip(snapshot.u.iter()) {
        out.push_str(&format_float(x));
        out.push(',');
        out.push_str(&format_float(u));
        out.push('\n');
    }
    write_atomically(path, &out)
}

/// Writes a run report as `key=value` lines in fixed order; the volatile
/// `wall_seconds` goes to the `.timing` sibling.
pub fn write_report(path: &Path, report: &RunReport) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(&format!("scheme={}\n", report.scheme));
    out.push_str(&format!("grid_x_max={}\n", format_float(report.x_max)));
    out.push_str(&format!("grid_n_x={}\n", report.n_x));
    out.push_str(&format!("grid_dt={}\n", format_float(report.dt)));
    out.push_str(&format!("grid_n_t={}\n", report.n_t));
    for &(t, sigma) in &report.sigma_by_time {
        out.push_str(&format!(
            "sigma[{}]={}\n",
            format_float(t),
            format_float(sigma)
        ));
    }
    for (name, drift) in &report.invariant_drift {
        out.push_str(&format!("drift[{name}]={}\n", format_float(*drift)));
    }
    write_atomically(path, &out)?;
    write_atomically(
        &timing_path(path),
        &format!("wall_seconds={}\n", format_float(report.wall_seconds)),
    )
}

/// Writes a refinement table as CSV (`dx,dt,sigma_final,measured_order,note`),
/// with per-row wall times in the `.timing` sibling.
pub fn write_table(path: &Path, table: &ConvergenceTable) -> io::Result<()> {
    let mut out = String::from("dx,dt,sigma_final,measured_order,note\n");
    let mut timing = String::from("dx,dt,wall_seconds\n");
    for row in &table.rows {
        let order = row
            .measured_order
            .map(|o| format_float(o))
            .unwrap_or_default();
        let note = row.note.as_deref().unwrap_or("");
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_float(row.dx),
            format_float(row.dt),
            format_float(row.sigma_final),
            order,
            note
        ));
        timing.push_str(&format!(
            "{},{},{}\n",
            format_float(row.dx),
            format_float(row.dt),
            format_float(row.wall_seconds)
        ));
    }
    write_atomically(path, &out)?;
    write_atomically(&timing_path(path), &timing)
}

/// Writes a two-scheme comparison as `key=value` lines; accuracy figures in
/// the main file, wall times and the speed ratio in the `.timing` sibling.
pub fn write_compare(path: &Path, report: &CompareReport) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(&format!("grid_x_max={}\n", format_float(report.x_max)));
    out.push_str(&format!("grid_n_x={}\n", report.n_x));
    out.push_str(&format!("grid_dt={}\n", format_float(report.dt)));
    out.push_str(&format!("grid_n_t={}\n", report.n_t));
    out.push_str(&format!(
        "sigma_final[polysymplectic]={}\n",
        format_float(report.sigma_box)
    ));
    out.push_str(&format!(
        "sigma_final[pseudospectral]={}\n",
        format_float(report.sigma_spectral)
    ));
    out.push_str(&format!(
        "accuracy_ratio={}\n",
        format_float(report.accuracy_ratio)
    ));
    out.push_str(&format!(
        "reference_accuracy_ratio_fullscale={}\n",
        format_float(report.reference_accuracy_ratio_fullscale)
    ));
    out.push_str(&format!(
        "reference_speed_ratio_fullscale={}\n",
        format_float(report.reference_speed_ratio_fullscale)
    ));
    write_atomically(path, &out)?;
    let timing = format!(
        "wall_seconds[polysymplectic]={}\nwall_seconds[pseudospectral]={}\nspeed_ratio={}\n",
        format_float(report.wall_box),
        format_float(report.wall_spectral),
        format_float(report.speed_ratio)
    );
    write_atomically(&timing_path(path), &timing)
}
