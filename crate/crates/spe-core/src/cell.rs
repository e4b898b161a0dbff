//! Single box-cell update: closed form, implicit oracle, and tangent map.
//!
//! A cell couples the four grid corners `(i,j)`, `(i+1,j)`, `(i,j+1)`,
//! `(i+1,j+1)`. Knowing the column to the right (`i+1`) and the bottom row,
//! the three cell-midpoint equations determine the top-left unknowns
//! `p_t(i,j+1)`, `phi(i,j+1)` and the pair sum `s_x(i,j) = p_x(i,j) +
//! p_x(i,j+1)`. Eliminating `phi` and `s_x` reduces the system to one monic
//! cubic in `p_t(i,j+1)` whose leading derivative is strictly negative
//! definite, so exactly one real root exists for every admissible cell.
//!
//! [`cell_update`] implements that closed form. [`implicit_cell_oracle`]
//! solves the same three equations by a damped Newton iteration and is kept
//! deliberately independent as a cross-check. [`tangent_cell_update`]
//! propagates first variations through the linearized cell.

use core::fmt;

use crate::cubic::{solve_cubic_select, CubicError};

/// Known data of one box cell.
///
/// Suffix convention: `here` is `(i, j)`, `right` is `(i+1, j)`,
/// `right_up` is `(i+1, j+1)`; `s_right` is the vertical `p_x` pair sum on
/// column `i+1` across this time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellInputs {
    pub p_t_here: f64,
    pub p_t_right: f64,
    pub p_t_right_up: f64,
    pub phi_here: f64,
    pub phi_right: f64,
    pub phi_right_up: f64,
    pub s_right: f64,
    pub dx: f64,
    pub dt: f64,
}

impl CellInputs {
    /// All-zero cell data on the given steps.
    pub fn zero(dx: f64, dt: f64) -> Self {
        CellInputs {
            p_t_here: 0.0,
            p_t_right: 0.0,
            p_t_right_up: 0.0,
            phi_here: 0.0,
            phi_right: 0.0,
            phi_right_up: 0.0,
            s_right: 0.0,
            dx,
            dt,
        }
    }

    /// Sum of the three known corner values of `p_t`.
    fn known_p_t_sum(&self) -> f64 {
        self.p_t_here + self.p_t_right + self.p_t_right_up
    }

    /// Largest magnitude among the cell values (floored at 1), used to
    /// scale residual tolerances.
    pub fn magnitude(&self) -> f64 {
        1.0f64
            .max(self.p_t_here.abs())
            .max(self.p_t_right.abs())
            .max(self.p_t_right_up.abs())
            .max(self.phi_here.abs())
            .max(self.phi_right.abs())
            .max(self.phi_right_up.abs())
            .max(self.s_right.abs())
    }
}

/// Solved top-left values: `up` is `(i, j+1)`, `s_here` the pair sum on
/// column `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOutputs {
    pub p_t_up: f64,
    pub phi_up: f64,
    pub s_here: f64,
}

/// First variations of the known cell data (same naming as [`CellInputs`]).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentIn {
    pub d_p_t_here: f64,
    pub d_p_t_right: f64,
    pub d_p_t_right_up: f64,
    pub d_phi_here: f64,
    pub d_phi_right: f64,
    pub d_phi_right_up: f64,
    pub d_s_right: f64,
}

/// First variations of the solved values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentOut {
    pub d_p_t_up: f64,
    pub d_phi_up: f64,
    pub d_s_here: f64,
}

/// Cell-level failures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellError {
    /// The reduced cubic produced no usable real root (defensive; cannot
    /// happen for finite cell data).
    NoRealRoot,
    /// The implicit solver failed to reach its residual tolerance.
    NewtonDiverged { iterations: u32, residual: f64 },
    /// The linearized cell system is (numerically) singular.
    SingularLinearization,
}

impl fmt::Display for CellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellError::NoRealRoot => write!(f, "cell cubic has no real root"),
            CellError::NewtonDiverged {
                iterations,
                residual,
            } => write!(
                f,
                "implicit cell solve stalled after {iterations} iterations (residual {residual:e})"
            ),
            CellError::SingularLinearization => {
                write!(f, "linearized cell system is singular")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CellError {}

impl From<CubicError> for CellError {
    fn from(_: CubicError) -> Self {
        CellError::NoRealRoot
    }
}

/// Coefficients `(c2, c1, c0)` of the reduced monic cubic
/// `P^3 + c2 P^2 + c1 P + c0 = 0` for the unknown `P = p_t(i, j+1)`.
///
/// With `A = 2 dx / dt + dx^2 / 2 > 0` the cubic's discriminant-of-the-
/// derivative is `-144 A < 0`, so it is strictly monotone and has exactly
/// one real root.
pub fn cubic_coefficients(c: &CellInputs) -> (f64, f64, f64) {
    let (dx, dt) = (c.dx, c.dt);
    let a = 2.0 * dx / dt + 0.5 * dx * dx;
    let s = c.known_p_t_sum();
    let c2 = 3.0 * s;
    let c1 = 3.0 * (s * s + 4.0 * a);
    let c0 = s * s * s + 24.0 * c.s_right - 24.0 / dt * (c.phi_right_up - c.phi_here)
        - 12.0 * dx * (c.phi_right + c.phi_right_up)
        + 12.0 * a * c.p_t_right_up
        + 6.0 * dx * dx * (c.p_t_right + c.p_t_here);
    (c2, c1, c0)
}

/// Recovers `phi(i, j+1)` once `p_t(i, j+1)` is known, from the cell
/// average of `phi_x = 2 p_t`.
pub fn update_phi(c: &CellInputs, p_t_up: f64) -> f64 {
    c.phi_right - c.phi_here + c.phi_right_up - c.dx * (c.known_p_t_sum() + p_t_up)
}

/// Recovers the pair sum `s_x(i, j)` once the top-left corner is known,
/// from the cell average of the divergence equation.
pub fn update_sx(c: &CellInputs, p_t_up: f64, phi_up: f64) -> f64 {
    let rate = c.dx / c.dt;
    c.s_right + rate * (p_t_up + c.p_t_right_up - c.p_t_here - c.p_t_right)
        - 0.5 * c.dx * (c.phi_here + c.phi_right + c.phi_right_up + phi_up)
}

/// Residuals of the three cell-midpoint equations for a candidate output.
///
/// All three vanish identically on exact solutions of the box scheme; the
/// closed-form update drives them to rounding level.
pub fn midpoint_residual(c: &CellInputs, o: &CellOutputs) -> [f64; 3] {
    let (dx, dt) = (c.dx, c.dt);
    let p_sum = c.known_p_t_sum() + o.p_t_up;
    let phi_sum = c.phi_here + c.phi_right + c.phi_right_up + o.phi_up;
    let r_a = (c.s_right - o.s_here) / (2.0 * dx)
        + (o.p_t_up + c.p_t_right_up - c.p_t_here - c.p_t_right) / (2.0 * dt)
        - 0.25 * phi_sum;
    let r_b = (c.phi_right + c.phi_right_up - c.phi_here - o.phi_up) / (2.0 * dx) - 0.5 * p_sum;
    let r_c = (o.phi_up + c.phi_right_up - c.phi_here - c.phi_right) / (2.0 * dt)
        - 0.5 * (o.s_here + c.s_right)
        - p_sum * p_sum * p_sum / 24.0;
    [r_a, r_b, r_c]
}

/// Closed-form cell update: one cubic solve, then two back-substitutions.
///
/// The cubic root nearest to `p_t(i, j)` is selected, which is the
/// continuity choice (and the only real root for admissible cells).
pub fn cell_update(c: &CellInputs) -> Result<CellOutputs, CellError> {
    let coeffs = cubic_coefficients(c);
    let p_t_up = solve_cubic_select(coeffs, c.p_t_here)?;
    let phi_up = update_phi(c, p_t_up);
    let s_here = update_sx(c, p_t_up, phi_up);
    Ok(CellOutputs {
        p_t_up,
        phi_up,
        s_here,
    })
}

/// Solves a 3x3 linear system by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot (relative to the matrix scale)
/// degenerates.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(1e-300);
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .expect("non-empty pivot range");
        if a[pivot_row][col].abs() < 1e-14 * scale {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = ((row + 1)..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Jacobian of the midpoint residuals with respect to the unknowns
/// `(p_t_up, phi_up, s_here)` at a given `p_t_up`.
fn unknown_jacobian(c: &CellInputs, p_t_up: f64) -> [[f64; 3]; 3] {
    let p_sum = c.known_p_t_sum() + p_t_up;
    [
        [1.0 / (2.0 * c.dt), -0.25, -1.0 / (2.0 * c.dx)],
        [-0.5, -1.0 / (2.0 * c.dx), 0.0],
        [-p_sum * p_sum / 8.0, 1.0 / (2.0 * c.dt), -0.5],
    ]
}

/// Convergence report of [`implicit_cell_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub outputs: CellOutputs,
    pub iterations: u32,
    pub residual: f64,
}

const ORACLE_MAX_ITERATIONS: u32 = 100;
const ORACLE_MAX_HALVINGS: u32 = 40;

/// Divided-difference amplification of the residual rows: corner
/// differences of `O(scale)` values get divided by `2 dx` or `2 dt`, so
/// the evaluation-roundoff floor of the residual grows by this factor on
/// fine steps.
fn row_gain(c: &CellInputs) -> f64 {
    1.0f64.max(1.0 / (2.0 * c.dx)).max(1.0 / (2.0 * c.dt))
}

/// Tolerance for the implicit solve: `1e-13 * scale` floored at the
/// residual's own rounding level (about 60 ulps through the divided
/// differences).
fn oracle_tolerance(c: &CellInputs) -> f64 {
    c.magnitude() * (1e-13f64).max(60.0 * f64::EPSILON * row_gain(c))
}

fn residual_norm(r: &[f64; 3]) -> f64 {
    r[0].abs().max(r[1].abs()).max(r[2].abs())
}

/// Independent implicit solve of the three cell equations by damped Newton
/// iteration, started from the bottom-left corner values.
///
/// This deliberately shares no algebra with [`cell_update`] beyond the
/// residual definition; agreement between the two certifies the closed
/// form's elimination steps.
pub fn implicit_cell_oracle(c: &CellInputs) -> Result<OracleReport, CellError> {
    let tol = oracle_tolerance(c);
    let mut out = CellOutputs {
        p_t_up: c.p_t_here,
        phi_up: c.phi_here,
        s_here: c.s_right,
    };
    let mut res = midpoint_residual(c, &out);
    let mut norm = residual_norm(&res);
    let mut iterations = 0;
    let mut converged = norm <= tol;

    while !converged && iterations < ORACLE_MAX_ITERATIONS {
        let jac = unknown_jacobian(c, out.p_t_up);
        let step = match solve3(jac, [-res[0], -res[1], -res[2]]) {
            Some(s) => s,
            None => {
                return Err(CellError::NewtonDiverged {
                    iterations,
                    residual: norm,
                })
            }
        };

        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..=ORACLE_MAX_HALVINGS {
            let trial = CellOutputs {
                p_t_up: out.p_t_up + lambda * step[0],
                phi_up: out.phi_up + lambda * step[1],
                s_here: out.s_here + lambda * step[2],
            };
            let trial_res = midpoint_residual(c, &trial);
            let trial_norm = residual_norm(&trial_res);
            if trial_norm < norm {
                out = trial;
                res = trial_res;
                norm = trial_norm;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        iterations += 1;
        if !improved {
            // The line search can only stall at the residual's rounding
            // floor; anywhere near the tolerance that is convergence, a
            // stall farther out is a genuine failure.
            if norm <= 4.0 * tol {
                converged = true;
                break;
            }
            return Err(CellError::NewtonDiverged {
                iterations,
                residual: norm,
            });
        }
        converged = norm <= tol;
    }
    if !converged {
        return Err(CellError::NewtonDiverged {
            iterations,
            residual: norm,
        });
    }

    // Polish: a couple of undamped Newton steps push the residual from the
    // tolerance down to its rounding floor, sharpening the oracle as a
    // cross-check reference. Kept only while they actually improve.
    for _ in 0..2 {
        let jac = unknown_jacobian(c, out.p_t_up);
        let Some(step) = solve3(jac, [-res[0], -res[1], -res[2]]) else {
            break;
        };
        let trial = CellOutputs {
            p_t_up: out.p_t_up + step[0],
            phi_up: out.phi_up + step[1],
            s_here: out.s_here + step[2],
        };
        let trial_res = midpoint_residual(c, &trial);
        let trial_norm = residual_norm(&trial_res);
        if trial_norm < norm {
            out = trial;
            res = trial_res;
            norm = trial_norm;
        } else {
            break;
        }
    }

    Ok(OracleReport {
        outputs: out,
        iterations,
        residual: norm,
    })
}

/// Propagates first variations through one solved cell.
///
/// Differentiating the three cell equations around the solved state gives
/// `J * d_out = -B * d_in`; `J` is the same Jacobian the implicit oracle
/// uses, evaluated at the solution.
pub fn tangent_cell_update(
    c: &CellInputs,
    o: &CellOutputs,
    v: &TangentIn,
) -> Result<TangentOut, CellError> {
    let (dx, dt) = (c.dx, c.dt);
    let p_sum = c.known_p_t_sum() + o.p_t_up;
    let d_p_known = v.d_p_t_here + v.d_p_t_right + v.d_p_t_right_up;
    let d_phi_known = v.d_phi_here + v.d_phi_right + v.d_phi_right_up;

    // Rows of B * d_in: residual sensitivities to the known data.
    let b_a = (v.d_p_t_right_up - v.d_p_t_here - v.d_p_t_right) / (2.0 * dt)
        - 0.25 * d_phi_known
        + v.d_s_right / (2.0 * dx);
    let b_b =
        (v.d_phi_right + v.d_phi_right_up - v.d_phi_here) / (2.0 * dx) - 0.5 * d_p_known;
    let b_c = (v.d_phi_right_up - v.d_phi_here - v.d_phi_right) / (2.0 * dt)
        - p_sum * p_sum / 8.0 * d_p_known
        - 0.5 * v.d_s_right;

    let jac = unknown_jacobian(c, o.p_t_up);
    let sol = solve3(jac, [-b_a, -b_b, -b_c]).ok_or(CellError::SingularLinearization)?;
    Ok(TangentOut {
        d_p_t_up: sol[0],
        d_phi_up: sol[1],
        d_s_here: sol[2],
    })
}
