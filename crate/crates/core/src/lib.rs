//! Spectral analysis of the linearized Ginzburg–Landau vortex.
//!
//! The crate builds, from scratch and in double precision, everything needed to
//! expand radial perturbations of the degree-`n` vortex in the generalized
//! eigenfunctions of the two half-line operators that govern its linearization:
//!
//! * [`vortex`]: the radial profile `U` by bracketed shooting, stabilized in the
//!   far field by a finite-difference boundary value solve;
//! * [`zero_modes`]: the threshold fundamental systems and their connection
//!   constants;
//! * [`eigenfunctions`]: the regular solution `Φ(r,k²)` (small-`rk` power series)
//!   and the Weyl solution `Ψ(r,k²)` (large-`rk` asymptotic series integrated
//!   inward);
//! * [`spectral_measure`]: the connection coefficient `a(k²)` and density
//!   `ρ'(k²) = 1/(4π|a|²)`;
//! * [`transform`]: forward/inverse distorted Fourier transforms and dyadic band
//!   projections;
//! * [`evolution`]: heat, Klein–Gordon and wave flows by spectral synthesis, with
//!   decay diagnostics;
//! * [`spectrum`]: positivity of the factorized operator, the Lieb–Thirring gap
//!   bound, and a shooting search for the discrete eigenvalues.
//!
//! [`numerics`] holds the shared kernels (Dormand–Prince integration with dense
//! output, Gauss–Kronrod quadrature, Brent root finding, Hermite and
//! Chebyshev-panel interpolation).
//!
//! ```no_run
//! use vortex_spectral::prelude::*;
//!
//! let profile = solve_profile(1, 50.0, Tolerance::default()).unwrap();
//! println!("U'(0) = {:.6}", profile.slope());
//! let lt = lt_bound(&solve_profile(1, 400.0, Tolerance::default()).unwrap(), 2.0).unwrap();
//! println!("no eigenvalue of L1 below {:.4}", lt.lambda0);
//! ```

// `!(x > 0.0)` is how inputs reject NaN along with out-of-range values, and
// the quadrature node tables are quoted at full published precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod eigenfunctions;
pub mod evolution;
pub mod numerics;
pub mod operator;
pub mod spectral_measure;
pub mod spectrum;
pub mod transform;
pub mod vortex;
pub mod zero_modes;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Everything a typical caller needs in one import.
pub mod prelude {
    pub use crate::eigenfunctions::{phi_global, EigenSystem, Eigenfunction, InnerSeries, WeylSolution};
    pub use crate::error::{Error, Result};
    pub use crate::evolution::{
        decay_report, evolve, verify_weighted_estimates, DecayReport, EvolutionSpec, Flow, InitialData,
    };
    pub use crate::numerics::{Grid, GridKind, Tolerance};
    pub use crate::operator::{Operator, OperatorKind};
    pub use crate::spectral_measure::{build_measure, connection_coefficient, SpectralMeasure};
    pub use crate::spectrum::{
        find_eigenvalues, lt_bound, susy_positivity, verify_tail_claim, EigenvalueList, LtBoundResult,
    };
    pub use crate::transform::{BandCutoffs, Bump, FieldSample, PlanConfig, SpectralPlan, SpectrumSample};
    pub use crate::vortex::{solve_profile, VortexProfile};
    pub use crate::zero_modes::ZeroEnergyBasis;
    pub use num_complex::Complex64;
}
