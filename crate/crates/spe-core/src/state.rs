//! Grid-attached state containers and initial/boundary data.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::grid::GridSpec;

/// One spatial column of scheme variables over all time levels.
///
/// `p_t[j]` and `phi[j]` live on nodes `(x_i, t_j)` for `j = 0..=n_t`.
/// The scheme never determines `p_x` pointwise, only the vertical pair sum
/// `s_x[j] = p_x(i, j) + p_x(i, j+1)` for `j = 0..n_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DWColumn {
    pub i: usize,
    pub p_t: Vec<f64>,
    pub phi: Vec<f64>,
    pub s_x: Vec<f64>,
}

impl DWColumn {
    /// All-zero column at spatial index `i`.
    pub fn zeros(i: usize, n_t: usize) -> Self {
        DWColumn {
            i,
            p_t: vec![0.0; n_t + 1],
            phi: vec![0.0; n_t + 1],
            s_x: vec![0.0; n_t],
        }
    }

    /// Number of time steps this column spans.
    pub fn n_t(&self) -> usize {
        self.s_x.len()
    }
}

/// First-variation counterpart of [`DWColumn`] with identical shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentColumn {
    pub i: usize,
    pub d_p_t: Vec<f64>,
    pub d_phi: Vec<f64>,
    pub d_s_x: Vec<f64>,
}

impl TangentColumn {
    pub fn zeros(i: usize, n_t: usize) -> Self {
        TangentColumn {
            i,
            d_p_t: vec![0.0; n_t + 1],
            d_phi: vec![0.0; n_t + 1],
            d_s_x: vec![0.0; n_t],
        }
    }
}

/// Field values `u(x_i, t)` on the full spatial grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

/// Rejected initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitError {
    /// `u0` must have `n_x + 1` samples.
    LengthMismatch { expected: usize, got: usize },
    /// The scheme marches leftward from a zero column, so the initial field
    /// must (numerically) vanish at the right edge.
    RightBoundaryNotVanishing { value: f64, limit: f64 },
}

impl fmt::Display for InitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitError::LengthMismatch { expected, got } => {
                write!(f, "initial field has {got} samples, grid needs {expected}")
            }
            InitError::RightBoundaryNotVanishing { value, limit } => write!(
                f,
                "initial field does not vanish at the right edge: |{value:e}| > {limit:e}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for InitError {}

/// Converts initial data `u0` into the bottom row of scheme variables.
///
/// Returns `(p_t_row, phi_row)`, both of length `n_x + 1`, with
/// `p_t = u0 / 2` and `phi` the cumulative trapezoid integral of `u0`
/// accumulated leftward from `phi = 0` at the right edge. The right-edge
/// sample must satisfy `|u0[n_x]| <= boundary_tol * max(|u0|)`.
pub fn initial_row(
    u0: &[f64],
    grid: &GridSpec,
    boundary_tol: f64,
) -> Result<(Vec<f64>, Vec<f64>), InitError> {
    let n_x = grid.n_x();
    if u0.len() != n_x + 1 {
        return Err(InitError::LengthMismatch {
            expected: n_x + 1,
            got: u0.len(),
        });
    }
    let amp = u0.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let limit = boundary_tol * amp;
    if u0[n_x].abs() > limit {
        return Err(InitError::RightBoundaryNotVanishing {
            value: u0[n_x],
            limit,
        });
    }

    let p_t_row: Vec<f64> = u0.iter().map(|&v| 0.5 * v).collect();

    let dx = grid.dx();
    let mut phi_row = vec![0.0; n_x + 1];
    for i in (0..n_x).rev() {
        phi_row[i] = phi_row[i + 1] - 0.5 * dx * (u0[i] + u0[i + 1]);
    }
    Ok((p_t_row, phi_row))
}

/// The right-edge column: identically zero, consistent with compactly
/// supported fields.
pub fn boundary_column(grid: &GridSpec) -> DWColumn {
    DWColumn::zeros(grid.n_x(), grid.n_t())
}
