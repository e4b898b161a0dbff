//! Space-time box grid.

use core::fmt;

/// Uniform grid on `[0, x_max] x [0, n_t * dt]`.
///
/// Nodes are `x_i = i * dx` for `i = 0..=n_x` and `t_j = j * dt` for
/// `j = 0..=n_t`. The spatial step is computed once at construction and
/// reused everywhere, so `dx * n_x == x_max` holds bit-for-bit with the
/// stored values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_max: f64,
    n_x: usize,
    dx: f64,
    dt: f64,
    n_t: usize,
}

/// Rejected grid parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridError {
    /// `x_max` must be finite and positive.
    NonPositiveExtent,
    /// At least one spatial cell is required.
    NoSpatialCells,
    /// `dt` must be finite and positive.
    NonPositiveTimeStep,
    /// At least one time step is required.
    NoTimeSteps,
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::NonPositiveExtent => write!(f, "grid extent x_max must be positive"),
            GridError::NoSpatialCells => write!(f, "grid needs at least one spatial cell"),
            GridError::NonPositiveTimeStep => write!(f, "time step dt must be positive"),
            GridError::NoTimeSteps => write!(f, "grid needs at least one time step"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GridError {}

impl GridSpec {
    /// Validates the parameters and fixes `dx = x_max / n_x`.
    pub fn new(x_max: f64, n_x: usize, dt: f64, n_t: usize) -> Result<Self, GridError> {
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(GridError::NonPositiveExtent);
        }
        if n_x == 0 {
            return Err(GridError::NoSpatialCells);
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(GridError::NonPositiveTimeStep);
        }
        if n_t == 0 {
            return Err(GridError::NoTimeSteps);
        }
        Ok(GridSpec {
            x_max,
            n_x,
            dx: x_max / n_x as f64,
            dt,
            n_t,
        })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// Node coordinate `x_i = i * dx`.
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    /// Time level `t_j = j * dt`.
    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }
}
