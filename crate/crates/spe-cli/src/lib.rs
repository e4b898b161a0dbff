//! Companion crate to `spe-core`: a pseudo-spectral reference integrator,
//! benchmark drivers, deterministic file output, and the `spe` binary.
//!
//! Everything here needs the standard library (files, timing, FFTs); the
//! numerical scheme itself lives in `spe-core`.

pub mod bench;
pub mod config;
pub mod report;
pub mod spectral;
pub mod verify;
