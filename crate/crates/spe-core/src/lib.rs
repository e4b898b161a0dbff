//! Structure-preserving integration toolkit for the short pulse equation
//! `u_xt = u + (1/6)(u^3)_xx`.
//!
//! The equation is integrated in light-cone form on a space-time box grid.
//! Working variables are the potential `phi` (with `u = phi_x`) and the two
//! polymomenta `p_x`, `p_t` of the associated first-order field theory. The
//! box scheme conserves a discrete 2-form flux across every cell, which is
//! what the [`metrics`] module measures.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature only switches float math from `libm` to the standard library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod fp;

pub mod cell;
pub mod cubic;
pub mod grid;
pub mod march;
pub mod metrics;
pub mod model;
pub mod soliton;
pub mod state;

pub use cell::{CellError, CellInputs, CellOutputs, OracleReport, TangentIn, TangentOut};
pub use cubic::CubicError;
pub use grid::{GridError, GridSpec};
pub use march::{MarchError, SchemeTrace, SimError, SimOutput, TangentTrace};
pub use metrics::{LengthMismatch, ShapeMismatch};
pub use model::{Axis, DWTriple};
pub use soliton::{PatchTooSmall, SolitonError, SolitonParams};
pub use state::{DWColumn, FieldSnapshot, InitError, TangentColumn};
