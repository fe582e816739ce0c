//! Benchmarks for the vortex-spectral pipeline live in `benches/`.
//!
//! This crate exposes the small shared setup those benchmarks use.

use vortex_spectral::prelude::*;

/// Degree-one profile solved at the default tolerance on `[0, r_max]`.
pub fn reference_profile(r_max: f64) -> VortexProfile {
    solve_profile(1, r_max, Tolerance::default()).expect("reference profile solves")
}
