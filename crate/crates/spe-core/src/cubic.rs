//! Closed-form real-root solver for monic cubics.

use core::fmt;

use crate::fp;

/// No real root could be produced (non-finite coefficients or a breakdown
/// in the closed form). A monic cubic with finite coefficients always has a
/// real root, so this is defensive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicError {
    NoRealRoot,
}

impl fmt::Display for CubicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CubicError::NoRealRoot => write!(f, "no real root found for cubic"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CubicError {}

fn eval(c: (f64, f64, f64), x: f64) -> f64 {
    ((x + c.0) * x + c.1) * x + c.2
}

fn eval_deriv(c: (f64, f64, f64), x: f64) -> f64 {
    (3.0 * x + 2.0 * c.0) * x + c.1
}

/// Real roots of `x^3 + c2 x^2 + c1 x + c0 = 0`, via the shifted
/// (depressed) form and Cardano / trisection formulas. Returns 1-3 roots.
fn real_roots(c: (f64, f64, f64)) -> ([f64; 3], usize) {
    let (c2, c1, c0) = c;
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = (2.0 * c2 * c2 / 9.0 - c1) * shift + c0;

    let half_q = 0.5 * q;
    let disc = half_q * half_q + (p / 3.0) * (p / 3.0) * (p / 3.0);

    if disc > 0.0 {
        // One real root. Pick the cube-root branch that avoids cancellation
        // and recover the partner factor from u * v = -p / 3.
        let r = fp::sqrt(disc);
        let big = if q <= 0.0 { -half_q + r } else { -half_q - r };
        let u = fp::cbrt(big);
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        ([u + v - shift, 0.0, 0.0], 1)
    } else if p == 0.0 {
        // disc <= 0 with p = 0 forces q = 0: a triple root.
        ([-shift, 0.0, 0.0], 1)
    } else {
        // Three real roots (two may coincide): trigonometric form.
        let m = 2.0 * fp::sqrt(-p / 3.0);
        let cos3t = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = fp::acos(cos3t) / 3.0;
        let tau = 2.0 * core::f64::consts::PI / 3.0;
        (
            [
                m * fp::cos(theta) - shift,
                m * fp::cos(theta - tau) - shift,
                m * fp::cos(theta - 2.0 * tau) - shift,
            ],
            3,
        )
    }
}

/// Solves `x^3 + c2 x^2 + c1 x + c0 = 0` and returns the real root nearest
/// to `reference`; when two roots are equally close the larger one wins.
/// The selected root gets one Newton polish step (kept only if it reduces
/// the polynomial residual).
pub fn solve_cubic_select(coeffs: (f64, f64, f64), reference: f64) -> Result<f64, CubicError> {
    if !(coeffs.0.is_finite() && coeffs.1.is_finite() && coeffs.2.is_finite()) {
        return Err(CubicError::NoRealRoot);
    }

    let (roots, count) = real_roots(coeffs);
    let mut best: Option<f64> = None;
    for &root in &roots[..count] {
        if !root.is_finite() {
            continue;
        }
        best = Some(match best {
            None => root,
            Some(cur) => {
                let (dc, dr) = ((cur - reference).abs(), (root - reference).abs());
                if dr < dc || (dr == dc && root > cur) {
                    root
                } else {
                    cur
                }
            }
        });
    }
    let root = best.ok_or(CubicError::NoRealRoot)?;

    let f0 = eval(coeffs, root);
    let d0 = eval_deriv(coeffs, root);
    if d0 != 0.0 {
        let polished = root - f0 / d0;
        if polished.is_finite() && eval(coeffs, polished).abs() <= f0.abs() {
            return Ok(polished);
        }
    }
    Ok(root)
}
