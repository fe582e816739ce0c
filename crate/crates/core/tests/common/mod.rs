//! Fixtures shared by the integration tests. Each test binary builds the
//! profiles and eigen-systems once and hands out `Arc` clones.

#![allow(dead_code)]

use std::sync::{Arc, OnceLock};
use vortex_spectral::numerics::ode::integrate_to_points;
use vortex_spectral::numerics::{OdeOptions, Tolerance};
use vortex_spectral::prelude::*;

pub fn profile() -> Arc<VortexProfile> {
    static P: OnceLock<Arc<VortexProfile>> = OnceLock::new();
    P.get_or_init(|| Arc::new(solve_profile(1, 60.0, Tolerance::default()).expect("degree-1 profile"))).clone()
}

pub fn profile_n2() -> Arc<VortexProfile> {
    static P: OnceLock<Arc<VortexProfile>> = OnceLock::new();
    P.get_or_init(|| Arc::new(solve_profile(2, 60.0, Tolerance::default()).expect("degree-2 profile"))).clone()
}

pub fn long_profile() -> Arc<VortexProfile> {
    static P: OnceLock<Arc<VortexProfile>> = OnceLock::new();
    P.get_or_init(|| Arc::new(solve_profile(1, 400.0, Tolerance::default()).expect("long profile"))).clone()
}

pub fn system(kind: OperatorKind) -> Arc<EigenSystem> {
    static H1: OnceLock<Arc<EigenSystem>> = OnceLock::new();
    static H2: OnceLock<Arc<EigenSystem>> = OnceLock::new();
    let cell = match kind {
        OperatorKind::H1 => &H1,
        OperatorKind::H2 => &H2,
    };
    cell.get_or_init(|| Arc::new(EigenSystem::new(profile(), kind).expect("eigen-system"))).clone()
}

/// Direct shooting of `-y'' + q y = k² y` from the two-term small-`r`
/// expansion `y = N r^{3/2}(1 + βr²)`, `β = -(k²+c)/8`, where `N` matches the
/// normalization of `Φ⁽⁰⁾` (`N = U'(0)` for `H₂`, `1` for `H₁`).
/// Independent of the series and Weyl machinery. Degree 1 only.
pub fn direct_eigenfunction(sys: &EigenSystem, k: f64, rs: &[f64]) -> Vec<f64> {
    direct_eigenfunction_with_derivative(sys, k, rs).into_iter().map(|(y, _)| y).collect()
}

/// `(Φ, Φ')` from the same direct shooting.
pub fn direct_eigenfunction_with_derivative(sys: &EigenSystem, k: f64, rs: &[f64]) -> Vec<(f64, f64)> {
    let op = sys.operator();
    let p = sys.profile();
    let norm = match op.kind {
        OperatorKind::H2 => p.slope(),
        OperatorKind::H1 => 1.0,
    };
    let r0: f64 = 1e-3;
    let beta = -(k * k + op.coupling()) / 8.0;
    let y0 = norm * r0.powf(1.5) * (1.0 + beta * r0 * r0);
    let dy0 = norm * (1.5 * r0.sqrt() + 3.5 * beta * r0.powf(2.5));
    let rhs = |r: f64, y: &[f64], d: &mut [f64]| {
        d[0] = y[1];
        d[1] = (op.potential(p, r) - k * k) * y[0];
    };
    let opts = OdeOptions::new(Tolerance { rel: 1e-13, abs: 1e-16 });
    integrate_to_points(rhs, (r0, *rs.last().unwrap()), &[y0, dy0], &opts, rs)
        .expect("oracle integration")
        .iter()
        .map(|s| (s[0], s[1]))
        .collect()
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}
