//! Pseudo-spectral baseline: Fourier derivatives on a periodic grid with
//! classical RK4 time stepping.
//!
//! The equation `u_xt = u + (1/6)(u^3)_xx` is integrated once in `x` to the
//! evolution form `u_t = dx_inv(u) + (1/6) (u^3)_x`, which is well defined
//! on zero-mean periodic data (the antiderivative's free constant is fixed
//! by a zero mean). Nonlinear terms are formed in physical space,
//! derivatives in mode space.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use spe_core::FieldSnapshot;

/// Periodic field state on `n` equispaced nodes `x_j = j * x_max / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub u: Vec<f64>,
    pub x_max: f64,
    pub t: f64,
}

/// Pseudo-spectral failures.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralError {
    /// Grid length must be a (nonzero) power of two.
    BadLength { len: usize },
    /// The zero-mean antiderivative is undefined: the field's mean exceeds
    /// the rejection threshold.
    NonZeroMean { mean: f64, limit: f64 },
    /// Blow-up guard: the field amplitude exceeded 1000x its initial value.
    InstabilityDetected { step: usize, amplitude: f64 },
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::BadLength { len } => {
                write!(f, "spectral grid length {len} is not a power of two")
            }
            SpectralError::NonZeroMean { mean, limit } => write!(
                f,
                "field mean {mean:e} exceeds the zero-mean limit {limit:e}"
            ),
            SpectralError::InstabilityDetected { step, amplitude } => write!(
                f,
                "time stepping became unstable at step {step} (amplitude {amplitude:e})"
            ),
        }
    }
}

impl std::error::Error for SpectralError {}

/// Relative tolerance below which a field counts as zero-mean.
const ZERO_MEAN_TOL: f64 = 1e-10;
/// Fields with relative mean above `ZERO_MEAN_TOL` but below this are
/// de-meaned with a warning; anything larger is rejected.
const DEMEAN_LIMIT: f64 = 1e-6;
/// Blow-up guard factor relative to the initial amplitude.
const INSTABILITY_FACTOR: f64 = 1e3;

fn mean(u: &[f64]) -> f64 {
    u.iter().sum::<f64>() / u.len() as f64
}

fn amplitude(u: &[f64]) -> f64 {
    u.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
}

fn check_length(len: usize) -> Result<(), SpectralError> {
    if len.is_power_of_two() {
        Ok(())
    } else {
        Err(SpectralError::BadLength { len })
    }
}

/// Shared transform plans and frequency table for one grid size.
struct Workspace {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    /// Signed angular frequency of each mode, `2 pi m / x_max` with
    /// `m in [-n/2, n/2)`.
    freq: Vec<f64>,
}

impl Workspace {
    fn new(n: usize, x_max: f64) -> Result<Self, SpectralError> {
        check_length(n)?;
        let mut planner = FftPlanner::new();
        let freq = (0..n)
            .map(|k| {
                let m = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
                2.0 * std::f64::consts::PI * m as f64 / x_max
            })
            .collect();
        Ok(Workspace {
            n,
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
            freq,
        })
    }

    fn to_modes(&self, u: &[f64]) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = u.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.fft.process(&mut buf);
        buf
    }

    fn to_field(&self, mut modes: Vec<Complex<f64>>) -> Vec<f64> {
        self.ifft.process(&mut modes);
        let scale = 1.0 / self.n as f64;
        modes.iter().map(|c| c.re * scale).collect()
    }

    /// Spectral derivative; the Nyquist mode's derivative is zeroed (its
    /// sign is ambiguous on the real grid).
    fn dx(&self, u: &[f64]) -> Vec<f64> {
        let mut modes = self.to_modes(u);
        for (k, c) in modes.iter_mut().enumerate() {
            *c = if k == self.n / 2 {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(0.0, self.freq[k]) * *c
            };
        }
        self.to_field(modes)
    }

    /// Zero-mean spectral antiderivative; mode 0 is pinned to zero and the
    /// Nyquist mode is zeroed for symmetry with [`Workspace::dx`].
    fn dx_inv(&self, u: &[f64]) -> Result<Vec<f64>, SpectralError> {
        let limit = ZERO_MEAN_TOL * 1.0f64.max(amplitude(u));
        let m = mean(u);
        if m.abs() > limit {
            return Err(SpectralError::NonZeroMean { mean: m, limit });
        }
        let mut modes = self.to_modes(u);
        for (k, c) in modes.iter_mut().enumerate() {
            *c = if k == 0 || k == self.n / 2 {
                Complex::new(0.0, 0.0)
            } else {
                *c / Complex::new(0.0, self.freq[k])
            };
        }
        Ok(self.to_field(modes))
    }

    /// Evolution right side `dx_inv(u) + (1/6) (u^3)_x`, optionally with a
    /// 2/3-rule truncation of the cubic term's spectrum.
    fn rhs(&self, u: &[f64], dealias: bool) -> Result<Vec<f64>, SpectralError> {
        let anti = self.dx_inv(u)?;
        let cubed: Vec<f64> = u.iter().map(|&v| v * v * v).collect();
        let mut modes = self.to_modes(&cubed);
        let cutoff = self.freq[self.n / 2 - 1].abs() * (2.0 / 3.0);
        for (k, c) in modes.iter_mut().enumerate() {
            *c = if k == self.n / 2 || (dealias && self.freq[k].abs() > cutoff) {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(0.0, self.freq[k]) * *c
            };
        }
        let du = self.to_field(modes);
        Ok(anti
            .iter()
            .zip(du.iter())
            .map(|(&a, &d)| a + d / 6.0)
            .collect())
    }
}

/// Discrete-Fourier-transform derivative of a periodic field.
pub fn spectral_dx(u: &[f64], x_max: f64) -> Result<Vec<f64>, SpectralError> {
    Ok(Workspace::new(u.len(), x_max)?.dx(u))
}

/// Zero-mean antiderivative of a (numerically) zero-mean periodic field.
pub fn spectral_dx_inv(u: &[f64], x_max: f64) -> Result<Vec<f64>, SpectralError> {
    Workspace::new(u.len(), x_max)?.dx_inv(u)
}

/// Evolution right side of the equation for the given state.
pub fn spe_rhs(state: &SpectralState) -> Result<Vec<f64>, SpectralError> {
    Workspace::new(state.u.len(), state.x_max)?.rhs(&state.u, false)
}

/// One classical RK4 step with a caller-supplied right side. Exposed so
/// the time integrator can be order-tested against problems with known
/// solutions, independent of the spectral machinery.
pub fn rk4_step_with<F>(state: &SpectralState, dt: f64, mut rhs: F) -> Result<SpectralState, SpectralError>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, SpectralError>,
{
    let u = &state.u;
    let add = |a: &[f64], k: &[f64], c: f64| -> Vec<f64> {
        a.iter().zip(k.iter()).map(|(&x, &y)| x + c * y).collect()
    };
    let k1 = rhs(u)?;
    let k2 = rhs(&add(u, &k1, 0.5 * dt))?;
    let k3 = rhs(&add(u, &k2, 0.5 * dt))?;
    let k4 = rhs(&add(u, &k3, dt))?;
    let next = u
        .iter()
        .zip(k1.iter().zip(k2.iter()).zip(k3.iter().zip(k4.iter())))
        .map(|(&x, ((&a, &b), (&c, &d)))| x + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d))
        .collect();
    Ok(SpectralState {
        u: next,
        x_max: state.x_max,
        t: state.t + dt,
    })
}

/// One RK4 step of the equation itself.
pub fn rk4_step(state: &SpectralState, dt: f64) -> Result<SpectralState, SpectralError> {
    let ws = Workspace::new(state.u.len(), state.x_max)?;
    rk4_step_with(state, dt, |u| ws.rhs(u, false))
}

/// Output of a fixed-step pseudo-spectral run.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRun {
    /// Requested snapshots in increasing time order.
    pub snapshots: Vec<FieldSnapshot>,
    /// `dx * sum(u^2)` (periodic quadrature) at every step `0..=n_t`.
    pub quadratic: Vec<f64>,
    /// Non-fatal notes (currently only the de-meaning of initial data).
    pub warnings: Vec<String>,
}

/// Integrates `u0` over `n_t` fixed RK4 steps, collecting snapshots at the
/// requested step indices.
///
/// Initial data with relative mean above `1e-10` is de-meaned (with a
/// warning) up to `1e-6` and rejected beyond that; a blow-up guard aborts
/// once the amplitude exceeds 1000x its initial value.
pub fn simulate_spectral(
    u0: &[f64],
    x_max: f64,
    dt: f64,
    n_t: usize,
    snapshot_js: &[usize],
    dealias: bool,
) -> Result<SpectralRun, SpectralError> {
    let ws = Workspace::new(u0.len(), x_max)?;
    let dx = x_max / u0.len() as f64;

    let mut warnings = Vec::new();
    let mut u = u0.to_vec();
    let amp0 = amplitude(&u);
    let m = mean(&u);
    let rel = m.abs() / 1.0f64.max(amp0);
    if rel > DEMEAN_LIMIT {
        return Err(SpectralError::NonZeroMean {
            mean: m,
            limit: DEMEAN_LIMIT * 1.0f64.max(amp0),
        });
    }
    if rel > ZERO_MEAN_TOL {
        for v in &mut u {
            *v -= m;
        }
        warnings.push(format!(
            "initial data de-meaned by {m:e} to satisfy the zero-mean requirement"
        ));
    }

    let mut wanted: Vec<usize> = snapshot_js.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    let mut snapshots = Vec::with_capacity(wanted.len());
    let mut quadratic = Vec::with_capacity(n_t + 1);

    let mut state = SpectralState { u, x_max, t: 0.0 };
    for step in 0..=n_t {
        quadratic.push(dx * state.u.iter().map(|&v| v * v).sum::<f64>());
        if wanted.binary_search(&step).is_ok() {
            snapshots.push(FieldSnapshot {
                t: step as f64 * dt,
                u: state.u.clone(),
            });
        }
        if step == n_t {
            break;
        }
        state = rk4_step_with(&state, dt, |u| ws.rhs(u, dealias))?;
        if amplitude(&state.u) > INSTABILITY_FACTOR * amp0 {
            return Err(SpectralError::InstabilityDetected {
                step: step + 1,
                amplitude: amplitude(&state.u),
            });
        }
    }
    Ok(SpectralRun {
        snapshots,
        quadratic,
        warnings,
    })
}
