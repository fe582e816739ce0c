//! Shared double-precision kernels.
//!
//! Everything here is pure: inputs are borrowed, outputs are owned values, and
//! nothing holds global state, so all of it can be called from rayon workers.

mod grid;
pub mod interp;
pub mod ode;
pub mod panels;
pub mod quad;
pub mod roots;

pub use grid::{Grid, GridKind};
pub use interp::{CubicHermite, QuinticHermite};
pub use ode::{integrate_ode, OdeOptions, Segment, Trajectory};
pub use panels::LogPanels;
pub use quad::{gauss_legendre, quad_adaptive, quad_oscillatory, quad_to_infinity};
pub use roots::{find_root_bracketed, Root};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative/absolute error targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(rel > 0.0 && rel <= 1e-2) || !(abs >= 0.0) || !abs.is_finite() {
            return Err(Error::InvalidInput(format!(
                "tolerance needs 0 < rel <= 1e-2 and abs >= 0 (got rel={rel:e}, abs={abs:e})"
            )));
        }
        Ok(Self { rel, abs })
    }

    /// Coarser setting used for time-evolution grids.
    pub fn evolution() -> Self {
        Self { rel: 1e-7, abs: 1e-10 }
    }

    /// `factor` times tighter in both components.
    pub fn tighter(self, factor: f64) -> Self {
        Self { rel: self.rel / factor, abs: self.abs / factor }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-10, abs: 1e-12 }
    }
}
