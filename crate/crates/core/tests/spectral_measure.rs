mod common;

use common::{direct_eigenfunction_with_derivative, profile, profile_n2, system};
use proptest::prelude::*;
use std::sync::OnceLock;
use vortex_spectral::numerics::ode::integrate_to_points;
use vortex_spectral::numerics::{Grid, OdeOptions, Tolerance};
use vortex_spectral::prelude::*;
use vortex_spectral::spectral_measure::{density_from, japanese, MAX_SPREAD};

fn measure(kind: OperatorKind) -> &'static SpectralMeasure {
    static H1: OnceLock<SpectralMeasure> = OnceLock::new();
    static H2: OnceLock<SpectralMeasure> = OnceLock::new();
    let cell = match kind {
        OperatorKind::H1 => &H1,
        OperatorKind::H2 => &H2,
    };
    cell.get_or_init(|| {
        let grid = Grid::log_uniform(0.05, 20.0, 160).unwrap();
        build_measure(&system(kind), &grid).unwrap()
    })
}

/// `a = (i/2)W(Φ, Ψ̄)` from two solutions that share nothing with the library's
/// construction: `Φ` shot outward from the origin series and `Ψ` integrated
/// inward as a plain complex ODE from the leading outgoing asymptotics
/// `k^{-1/2}e^{ikr}(1 + f₁/(kr))` far out.
fn brute_force_a(kind: OperatorKind, k: f64) -> Complex64 {
    let sys = system(kind);
    let p = profile();
    let op = sys.operator();
    let r_far: f64 = 400.0;
    let r_mid = 3.0;
    // leading correction: σ ≈ 1 + (i/2)(q₂/r)/k with q ≈ q₂/r²
    let q2 = op.far_coefficients(&p)[0];
    let sigma = Complex64::new(1.0, 0.0) + Complex64::new(0.0, 0.5 * q2 / (k * r_far));
    let dsigma = Complex64::new(0.0, -0.5 * q2 / (k * r_far * r_far));
    let e = Complex64::from_polar(k.powf(-0.5), k * r_far);
    let psi = e * sigma;
    let dpsi = e * (Complex64::new(0.0, k) * sigma + dsigma);
    let rhs = |r: f64, y: &[f64], d: &mut [f64]| {
        let q = op.potential(&p, r) - k * k;
        d[0] = y[2];
        d[1] = y[3];
        d[2] = q * y[0];
        d[3] = q * y[1];
    };
    let opts = OdeOptions::new(Tolerance { rel: 1e-13, abs: 1e-16 });
    let out = integrate_to_points(rhs, (r_far, r_mid), &[psi.re, psi.im, dpsi.re, dpsi.im], &opts, &[r_mid]).unwrap();
    let (psi, dpsi) = (Complex64::new(out[0][0], out[0][1]), Complex64::new(out[0][2], out[0][3]));
    let (phi, dphi) = direct_eigenfunction_with_derivative(&sys, k, &[r_mid])[0];
    Complex64::new(0.0, 0.5) * (phi * dpsi.conj() - dphi * psi.conj())
}

#[test]
fn connection_coefficient_against_brute_force() {
    for kind in [OperatorKind::H2, OperatorKind::H1] {
        for k in [1.0, 3.0] {
            let a = connection_coefficient(&system(kind), k).unwrap();
            let oracle = brute_force_a(kind, k);
            // truncating the outgoing seed after one term costs O((kR)^{-2})
            let rel = (a - oracle).norm() / oracle.norm();
            assert!(rel < 1e-4, "{kind:?} k={k}: {a} vs {oracle} ({rel:.2e})");
        }
    }
}

#[test]
fn density_identity_is_exact() {
    for kind in [OperatorKind::H1, OperatorKind::H2] {
        let m = measure(kind);
        for (a, d) in m.a_values().iter().zip(m.density()) {
            let back = d * a.norm_sqr() * 4.0 * std::f64::consts::PI;
            assert!((back - 1.0).abs() < 1e-14);
            assert_eq!(*d, density_from(*a));
        }
    }
}

#[test]
fn weighted_magnitude_stays_in_a_band() {
    for kind in [OperatorKind::H1, OperatorKind::H2] {
        let m = measure(kind);
        let (lo, hi) = m.band();
        assert!(lo > 0.0 && hi / lo <= 10.0, "{kind:?}: band [{lo}, {hi}]");
        assert!(m.max_spread() <= MAX_SPREAD);
        // density / ⟨k⟩² lies in the matching band
        for (&k, &d) in m.k_grid().iter().zip(m.density()) {
            let scaled = d / japanese(k).powi(2) * 4.0 * std::f64::consts::PI;
            assert!(scaled >= 1.0 / (hi * hi) * (1.0 - 1e-12) && scaled <= 1.0 / (lo * lo) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn frozen_weighted_magnitudes() {
    // ⟨k⟩|a| at selected k, frozen from the converged construction.
    let cases = [
        (OperatorKind::H2, 0.1, 0.4129),
        (OperatorKind::H2, 1.0, 0.4647),
        (OperatorKind::H2, 20.0, 0.4653),
        (OperatorKind::H1, 1.0, 0.5653),
        (OperatorKind::H1, 20.0, 0.7959),
    ];
    for (kind, k, v) in cases {
        let a = connection_coefficient(&system(kind), k).unwrap();
        assert!((japanese(k) * a.norm() - v).abs() < 1e-4, "{kind:?} k={k}: {}", japanese(k) * a.norm());
    }
}

#[test]
fn high_frequency_h1_scaling() {
    let sys = system(OperatorKind::H1);
    let vals: Vec<f64> = [5.0, 8.0, 12.0, 16.0, 20.0]
        .iter()
        .map(|&k| k * connection_coefficient(&sys, k).unwrap().norm())
        .collect();
    let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo <= 1.1, "k|a| over [5,20]: {vals:?}");
}

/// The H1 connection coefficient oscillates in `ln k` near threshold with
/// period `π/√2`, but never approaches zero.
#[test]
fn h1_threshold_oscillation() {
    let sys = system(OperatorKind::H1);
    let ks: Vec<f64> = (0..60).map(|i| 0.002 * 1.08f64.powi(i)).collect();
    let mags: Vec<f64> = ks.iter().map(|&k| connection_coefficient(&sys, k).unwrap().norm()).collect();
    let (lo, hi) = mags.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(lo > 0.45 && hi < 0.52, "|a| range [{lo}, {hi}]");
    assert!(hi - lo > 1e-3, "expected a visible log-periodic ripple");
}

#[test]
fn non_vanishing_floor() {
    for kind in [OperatorKind::H1, OperatorKind::H2] {
        let m = measure(kind);
        let floor = m.oscillation_floor().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(floor > 0.02, "{kind:?}: floor {floor}");
        let amin = m.a_values().iter().map(|a| a.norm()).fold(f64::INFINITY, f64::min);
        assert!(amin > 0.0);
    }
}

#[test]
fn continuity_on_fine_grid() {
    let h2 = build_measure(&system(OperatorKind::H2), &Grid::uniform(0.05, 5.0, 248).unwrap()).unwrap();
    assert!(h2.max_adjacent_jump() <= 0.05, "H2: {}", h2.max_adjacent_jump());
    // The H1 phase winds like √2 ln k near threshold, so the step is taken in ln k.
    let n = ((20.0f64 / 0.05).ln() / 0.02).ceil() as usize + 1;
    let h1 = build_measure(&system(OperatorKind::H1), &Grid::log_uniform(0.05, 20.0, n).unwrap()).unwrap();
    assert!(h1.max_adjacent_jump() <= 0.05, "H1: {}", h1.max_adjacent_jump());
}

/// Second divided differences of `⟨k⟩a` in `ln k` converge under refinement
/// instead of growing.
#[test]
fn symbol_differences_are_bounded() {
    for kind in [OperatorKind::H1, OperatorKind::H2] {
        let at = |n| build_measure(&system(kind), &Grid::log_uniform(0.05, 20.0, n).unwrap()).unwrap().symbol_second_difference();
        let (coarse, fine) = (at(41), at(161));
        assert!(fine < 2.0, "{kind:?}: {fine}");
        assert!(fine <= 1.05 * coarse, "{kind:?}: {coarse} -> {fine}");
    }
}

#[test]
fn degree_two_band() {
    let sys = EigenSystem::new(profile_n2(), OperatorKind::H1).unwrap();
    let grid = Grid::log_uniform(0.05, 20.0, 40).unwrap();
    let m = build_measure(&sys, &grid).unwrap();
    assert_eq!(m.degree(), 2);
    let (lo, hi) = m.band();
    assert!(lo > 0.0 && hi / lo <= 10.0, "band [{lo}, {hi}]");
}

#[test]
fn rejects_nonpositive_grid() {
    let grid = Grid::uniform(0.0, 1.0, 5).unwrap();
    assert!(build_measure(&system(OperatorKind::H2), &grid).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spread_and_identity_hold_anywhere(k in 0.02f64..25.0, h1 in any::<bool>()) {
        let sys = system(if h1 { OperatorKind::H1 } else { OperatorKind::H2 });
        let a = connection_coefficient(&sys, k).unwrap();
        prop_assert!(a.norm() > 0.0);
        prop_assert!((density_from(a) * a.norm_sqr() * 4.0 * std::f64::consts::PI - 1.0).abs() < 1e-14);
        let w = japanese(k) * a.norm();
        prop_assert!(w > 0.3 && w < 1.0);
    }
}
