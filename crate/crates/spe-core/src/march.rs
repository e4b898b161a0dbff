//! Right-to-left column marching and whole-grid simulation drivers.
//!
//! The scheme is explicit per column: column `i` is fully determined by
//! column `i+1` plus the initial-row values at `(i, 0)`, marching cells in
//! increasing `j`. Pulses that vanish at the right edge therefore integrate
//! exactly leftward from the all-zero boundary column.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cell::{
    cell_update, tangent_cell_update, CellError, CellInputs, CellOutputs, TangentIn,
};
use crate::grid::GridSpec;
use crate::model::{dw_hamiltonian, DWTriple};
use crate::state::{boundary_column, initial_row, DWColumn, FieldSnapshot, InitError, TangentColumn};

/// A cell failure annotated with its grid location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchError {
    pub i: usize,
    pub j: usize,
    pub source: CellError,
}

impl fmt::Display for MarchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cell update failed at column {}, time step {}: {}",
            self.i, self.j, self.source
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MarchError {}

/// Failures of the grid-level drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimError {
    Init(InitError),
    March(MarchError),
    SnapshotOutOfRange { j: usize, n_t: usize },
    SeedLengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Init(e) => write!(f, "{e}"),
            SimError::March(e) => write!(f, "{e}"),
            SimError::SnapshotOutOfRange { j, n_t } => {
                write!(f, "snapshot index {j} exceeds the last time level {n_t}")
            }
            SimError::SeedLengthMismatch { expected, got } => {
                write!(f, "tangent seed row has {got} entries, grid needs {expected}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SimError {}

impl From<InitError> for SimError {
    fn from(e: InitError) -> Self {
        SimError::Init(e)
    }
}

impl From<MarchError> for SimError {
    fn from(e: MarchError) -> Self {
        SimError::March(e)
    }
}

/// Computes column `right.i - 1` from a fully known right column and the
/// initial-row seeds `(p_t_0, phi_0)` at the new column's bottom node.
pub fn march_column(
    grid: &GridSpec,
    right: &DWColumn,
    p_t_0: f64,
    phi_0: f64,
) -> Result<DWColumn, MarchError> {
    debug_assert!(right.i >= 1, "no column exists left of i = 0");
    debug_assert_eq!(right.n_t(), grid.n_t(), "right column spans the grid");
    let i = right.i - 1;
    let mut col = DWColumn::zeros(i, grid.n_t());
    col.p_t[0] = p_t_0;
    col.phi[0] = phi_0;
    for j in 0..grid.n_t() {
        let c = CellInputs {
            p_t_here: col.p_t[j],
            p_t_right: right.p_t[j],
            p_t_right_up: right.p_t[j + 1],
            phi_here: col.phi[j],
            phi_right: right.phi[j],
            phi_right_up: right.phi[j + 1],
            s_right: right.s_x[j],
            dx: grid.dx(),
            dt: grid.dt(),
        };
        let o = cell_update(&c).map_err(|source| MarchError { i, j, source })?;
        col.p_t[j + 1] = o.p_t_up;
        col.phi[j + 1] = o.phi_up;
        col.s_x[j] = o.s_here;
    }
    Ok(col)
}

/// Streaming output of [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    /// Requested snapshots in increasing time order.
    pub snapshots: Vec<FieldSnapshot>,
    /// Trapezoidal `int u^2 dx` at every time level `j = 0..=n_t`.
    pub quadratic: Vec<f64>,
    /// Trapezoidal spatial integral of the generating density `H`, sampled
    /// at time-interval midpoints `j + 1/2` (where the pair sums live),
    /// for `j = 0..n_t`.
    pub dw_integral: Vec<f64>,
}

/// Accumulates one column's share of the invariant monitors.
///
/// `weight` is the trapezoid weight of node `i` (1/2 at the edges).
fn accumulate_monitors(
    col: &DWColumn,
    weight: f64,
    dx: f64,
    quadratic: &mut [f64],
    dw_integral: &mut [f64],
) {
    for (j, q) in quadratic.iter_mut().enumerate() {
        let u = 2.0 * col.p_t[j];
        *q += weight * dx * u * u;
    }
    for (j, h) in dw_integral.iter_mut().enumerate() {
        let z = DWTriple::new(
            0.5 * (col.phi[j] + col.phi[j + 1]),
            0.5 * col.s_x[j],
            0.5 * (col.p_t[j] + col.p_t[j + 1]),
        );
        *h += weight * dx * dw_hamiltonian(z);
    }
}

/// Integrates initial data `u0` over the whole grid, collecting snapshots
/// at the requested time indices and streaming invariant monitors.
///
/// Only two columns are resident at any moment. The `j = 0` snapshot (when
/// requested) is the initial data itself, passed through bit-for-bit.
pub fn simulate(
    grid: &GridSpec,
    u0: &[f64],
    snapshot_js: &[usize],
    boundary_tol: f64,
) -> Result<SimOutput, SimError> {
    let (n_x, n_t) = (grid.n_x(), grid.n_t());
    for &j in snapshot_js {
        if j > n_t {
            return Err(SimError::SnapshotOutOfRange { j, n_t });
        }
    }
    let (p_t_row, phi_row) = initial_row(u0, grid, boundary_tol)?;

    let mut wanted: Vec<usize> = snapshot_js.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    let mut snapshots: Vec<FieldSnapshot> = wanted
        .iter()
        .map(|&j| FieldSnapshot {
            t: grid.t(j),
            u: vec![0.0; n_x + 1],
        })
        .collect();

    let mut quadratic = vec![0.0; n_t + 1];
    let mut dw_integral = vec![0.0; n_t];

    let mut col = boundary_column(grid);
    let mut record = |col: &DWColumn, snapshots: &mut [FieldSnapshot]| {
        let weight = if col.i == 0 || col.i == n_x { 0.5 } else { 1.0 };
        accumulate_monitors(col, weight, grid.dx(), &mut quadratic, &mut dw_integral);
        for (slot, &j) in snapshots.iter_mut().zip(wanted.iter()) {
            slot.u[col.i] = 2.0 * col.p_t[j];
        }
    };
    record(&col, &mut snapshots);

    for i in (0..n_x).rev() {
        let next = march_column(grid, &col, p_t_row[i], phi_row[i])?;
        record(&next, &mut snapshots);
        col = next;
    }

    // Initial-data passthrough: the right-edge node of u0 may be tolerably
    // nonzero while the scheme's boundary column is pinned to zero, so the
    // j = 0 snapshot is served from u0 itself.
    if let Some(pos) = wanted.iter().position(|&j| j == 0) {
        snapshots[pos].u.copy_from_slice(u0);
    }

    Ok(SimOutput {
        snapshots,
        quadratic,
        dw_integral,
    })
}

/// Full grid history of scheme variables, one [`DWColumn`] per node column.
///
/// `columns[i].i == i`; this trades memory for random access and backs the
/// tangent propagation and conservation-law tests.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeTrace {
    pub columns: Vec<DWColumn>,
}

impl SchemeTrace {
    pub fn n_x(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn n_t(&self) -> usize {
        self.columns[0].n_t()
    }

    /// Known data of cell `(i, j)` as consumed by the cell update.
    pub fn cell_inputs(&self, grid: &GridSpec, i: usize, j: usize) -> CellInputs {
        let (here, right) = (&self.columns[i], &self.columns[i + 1]);
        CellInputs {
            p_t_here: here.p_t[j],
            p_t_right: right.p_t[j],
            p_t_right_up: right.p_t[j + 1],
            phi_here: here.phi[j],
            phi_right: right.phi[j],
            phi_right_up: right.phi[j + 1],
            s_right: right.s_x[j],
            dx: grid.dx(),
            dt: grid.dt(),
        }
    }

    /// Solved values of cell `(i, j)`.
    pub fn cell_outputs(&self, i: usize, j: usize) -> CellOutputs {
        let here = &self.columns[i];
        CellOutputs {
            p_t_up: here.p_t[j + 1],
            phi_up: here.phi[j + 1],
            s_here: here.s_x[j],
        }
    }
}

/// Like [`simulate`], but keeps every column in memory.
pub fn simulate_trace(
    grid: &GridSpec,
    u0: &[f64],
    boundary_tol: f64,
) -> Result<SchemeTrace, SimError> {
    let (p_t_row, phi_row) = initial_row(u0, grid, boundary_tol)?;
    let n_x = grid.n_x();
    let mut columns = vec![boundary_column(grid)];
    for i in (0..n_x).rev() {
        let right = columns.last().expect("at least the boundary column");
        let col = march_column(grid, right, p_t_row[i], phi_row[i])?;
        columns.push(col);
    }
    columns.reverse();
    Ok(SchemeTrace { columns })
}

/// Full grid history of one tangent (first-variation) solution.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentTrace {
    pub columns: Vec<TangentColumn>,
}

impl TangentTrace {
    /// Largest absolute entry across all tangent variables.
    pub fn magnitude(&self) -> f64 {
        let mut m = 0.0f64;
        for col in &self.columns {
            for v in col.d_p_t.iter().chain(&col.d_phi).chain(&col.d_s_x) {
                m = m.max(v.abs());
            }
        }
        m
    }
}

/// Propagates an initial-row variation through the linearized scheme along
/// a recorded base run.
///
/// `d_p_t_row` and `d_phi_row` seed the bottom nodes of every column; the
/// right-edge entries must be zero because the boundary column is pinned
/// (they are forced to zero here regardless).
pub fn propagate_tangent(
    grid: &GridSpec,
    trace: &SchemeTrace,
    d_p_t_row: &[f64],
    d_phi_row: &[f64],
) -> Result<TangentTrace, SimError> {
    let (n_x, n_t) = (grid.n_x(), grid.n_t());
    for row in [d_p_t_row, d_phi_row] {
        if row.len() != n_x + 1 {
            return Err(SimError::SeedLengthMismatch {
                expected: n_x + 1,
                got: row.len(),
            });
        }
    }

    let mut columns = vec![TangentColumn::zeros(n_x, n_t)];
    for i in (0..n_x).rev() {
        let right = columns.last().expect("at least the boundary column");
        let mut col = TangentColumn::zeros(i, n_t);
        col.d_p_t[0] = d_p_t_row[i];
        col.d_phi[0] = d_phi_row[i];
        for j in 0..n_t {
            let c = trace.cell_inputs(grid, i, j);
            let o = trace.cell_outputs(i, j);
            let v = TangentIn {
                d_p_t_here: col.d_p_t[j],
                d_p_t_right: right.d_p_t[j],
                d_p_t_right_up: right.d_p_t[j + 1],
                d_phi_here: col.d_phi[j],
                d_phi_right: right.d_phi[j],
                d_phi_right_up: right.d_phi[j + 1],
                d_s_right: right.d_s_x[j],
            };
            let out = tangent_cell_update(&c, &o, &v)
                .map_err(|source| SimError::March(MarchError { i, j, source }))?;
            col.d_p_t[j + 1] = out.d_p_t_up;
            col.d_phi[j + 1] = out.d_phi_up;
            col.d_s_x[j] = out.d_s_here;
        }
        columns.push(col);
    }
    columns.reverse();
    Ok(TangentTrace { columns })
}
