//! Error norms, invariant monitors, and the discrete conservation check.

use core::fmt;

use crate::fp;
use crate::grid::GridSpec;
use crate::march::{SchemeTrace, TangentTrace};
use crate::model::{kappa_eval, Axis, DWTriple};
use crate::state::FieldSnapshot;

/// Compared fields must have equal sample counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthMismatch {
    pub left: usize,
    pub right: usize,
}

impl fmt::Display for LengthMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "snapshots have different lengths: {} vs {}",
            self.left, self.right
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LengthMismatch {}

/// Traces fed to the conservation check must share one grid shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapeMismatch {
    pub what: &'static str,
}

impl fmt::Display for ShapeMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "trace shapes disagree: {}", self.what)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ShapeMismatch {}

/// Root-mean-square deviation between two snapshots:
/// `sigma = sqrt(sum_i (a_i - b_i)^2 / N)`.
pub fn sigma_error(a: &FieldSnapshot, b: &FieldSnapshot) -> Result<f64, LengthMismatch> {
    if a.u.len() != b.u.len() {
        return Err(LengthMismatch {
            left: a.u.len(),
            right: b.u.len(),
        });
    }
    debug_assert!(
        (a.t - b.t).abs() <= 1e-12 * 1.0f64.max(a.t.abs()),
        "sigma compares fields at equal times ({} vs {})",
        a.t,
        b.t
    );
    if a.u.is_empty() {
        return Ok(0.0);
    }
    let sum_sq: f64 = a
        .u
        .iter()
        .zip(b.u.iter())
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum();
    Ok(fp::sqrt(sum_sq / a.u.len() as f64))
}

/// Trapezoidal `int u^2 dx` over the snapshot's grid.
pub fn quadratic_invariant(snapshot: &FieldSnapshot, dx: f64) -> f64 {
    let u = &snapshot.u;
    if u.len() < 2 {
        return 0.0;
    }
    let mut sum = 0.5 * (u[0] * u[0] + u[u.len() - 1] * u[u.len() - 1]);
    for &v in &u[1..u.len() - 1] {
        sum += v * v;
    }
    dx * sum
}

/// Largest relative deviation of a monitored series from its first value.
pub fn max_relative_drift(series: &[f64]) -> f64 {
    let Some(&q0) = series.first() else {
        return 0.0;
    };
    let max_dev = series.iter().fold(0.0f64, |m, &q| m.max((q - q0).abs()));
    if max_dev == 0.0 {
        0.0
    } else {
        max_dev / q0.abs().max(f64::MIN_POSITIVE)
    }
}

/// Tangent triple at a horizontal half-node `(i + 1/2, j)`: the average of
/// the two neighboring node variations.
fn half_x(v: &TangentTrace, i: usize, j: usize) -> DWTriple {
    let (a, b) = (&v.columns[i], &v.columns[i + 1]);
    DWTriple::new(
        0.5 * (a.d_phi[j] + b.d_phi[j]),
        0.0,
        0.5 * (a.d_p_t[j] + b.d_p_t[j]),
    )
}

/// Tangent triple at a vertical half-node `(i, j + 1/2)`. The only `p_x`
/// datum the scheme defines there is the pair-sum variation, whose half is
/// the interval-centered value.
fn half_t(v: &TangentTrace, i: usize, j: usize) -> DWTriple {
    let col = &v.columns[i];
    DWTriple::new(
        0.5 * (col.d_phi[j] + col.d_phi[j + 1]),
        0.5 * col.d_s_x[j],
        0.0,
    )
}

/// Maximum cell residual of the discrete two-form conservation law over
/// two tangent solutions, normalized by the product of the tangents'
/// magnitudes (so it is invariant under rescaling either tangent).
///
/// Per cell the law balances the time difference of the `t`-flux against
/// the space difference of the `x`-flux:
/// `[k_t(i+1/2, j+1) - k_t(i+1/2, j)] / dt + [k_x(i+1, j+1/2) - k_x(i, j+1/2)] / dx`.
/// Both flux densities must carry the same wedge orientation `dp ^ dphi`
/// for the telescoping cancellation to happen; [`kappa_eval`]'s
/// x-component is oriented the opposite way, hence the sign below.
pub fn msl_residual(
    base: &SchemeTrace,
    v1: &TangentTrace,
    v2: &TangentTrace,
    grid: &GridSpec,
) -> Result<f64, ShapeMismatch> {
    let (n_x, n_t) = (grid.n_x(), grid.n_t());
    if base.columns.len() != n_x + 1 {
        return Err(ShapeMismatch {
            what: "base trace column count",
        });
    }
    if base.n_t() != n_t {
        return Err(ShapeMismatch {
            what: "base trace time levels",
        });
    }
    for v in [v1, v2] {
        if v.columns.len() != n_x + 1 {
            return Err(ShapeMismatch {
                what: "tangent trace column count",
            });
        }
        if v.columns.iter().any(|c| c.d_s_x.len() != n_t) {
            return Err(ShapeMismatch {
                what: "tangent trace time levels",
            });
        }
    }

    let norm = v1.magnitude() * v2.magnitude();
    if norm == 0.0 {
        return Ok(0.0);
    }

    let mut worst = 0.0f64;
    for i in 0..n_x {
        for j in 0..n_t {
            let kt_lo = kappa_eval(Axis::T, half_x(v1, i, j), half_x(v2, i, j));
            let kt_hi = kappa_eval(Axis::T, half_x(v1, i, j + 1), half_x(v2, i, j + 1));
            let kx_left = -kappa_eval(Axis::X, half_t(v1, i, j), half_t(v2, i, j));
            let kx_right = -kappa_eval(Axis::X, half_t(v1, i + 1, j), half_t(v2, i + 1, j));
            let r = (kt_hi - kt_lo) / grid.dt() + (kx_right - kx_left) / grid.dx();
            worst = worst.max(r.abs());
        }
    }
    Ok(worst / norm)
}
