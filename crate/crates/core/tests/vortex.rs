mod common;

use common::{linspace, logspace, profile, profile_n2};
use proptest::prelude::*;
use vortex_spectral::numerics::{integrate_ode, Tolerance};
use vortex_spectral::vortex::{shoot, solve_profile, Classification, R_START};

#[test]
fn degree_one_slope_and_bracket() {
    let p = profile();
    assert!((p.slope() - 0.5832).abs() < 1e-3, "slope {}", p.slope());
    assert!(p.bracket_width() <= 1e-10);
    let (lo, hi) = p.bracket();
    assert!(lo <= p.slope() && p.slope() <= hi);
}

#[test]
fn slope_is_frozen() {
    // Golden value from the converged shooting run (r_max 60, rel 1e-10).
    assert!((profile().slope() - 0.583189495860378).abs() < 1e-9);
}

#[test]
fn shooting_classifies_both_sides() {
    let a = profile().slope();
    assert_eq!(shoot(1, a * 1.01, 30.0, Tolerance::default()).unwrap().classification, Classification::Overshoot);
    assert_eq!(shoot(1, a * 0.99, 30.0, Tolerance::default()).unwrap().classification, Classification::Undershoot);
}

#[test]
fn origin_behaviour() {
    let p = profile();
    assert_eq!(p.eval(0.0), (0.0, p.slope()));
    let (u, _) = p.eval(1e-4);
    assert!((u / 1e-4 - p.slope()).abs() < 1e-8);
    assert!((p.one_minus_u2(1e-6) - 1.0).abs() < 1e-12);
}

#[test]
fn profile_is_increasing_and_bounded() {
    let p = profile();
    let (u, du) = p.table_values();
    for (i, (&u, &du)) in u.iter().zip(du).enumerate() {
        assert!(u > 0.0 && u < 1.0, "U out of range at node {i}");
        assert!(du > 0.0, "U' not positive at node {i}");
    }
    let r = p.r_max();
    assert!((1.0 - p.eval(r).0).abs() <= 2.0 / (r * r));
}

#[test]
fn ode_residual_is_small() {
    let p = profile();
    let worst = logspace(0.1, p.r_max(), 3000).into_iter().map(|r| p.residual(r).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-6, "residual {worst:.2e}");
}

#[test]
fn inverse_square_decay() {
    let p = profile();
    for r in linspace(20.0, p.r_max(), 200) {
        let v = r * r * p.one_minus_u2(r);
        assert!((0.8..=1.2).contains(&v), "r²(1-U²) = {v} at {r}");
    }
    for r in linspace(30.0, 50.0, 21) {
        assert!((r * r * p.one_minus_u2(r) - 1.0).abs() < 0.02);
    }
    assert!(p.one_minus_u2(7.0) < 1.1 / 49.0);
}

#[test]
fn seam_and_far_field_are_continuous() {
    let p = profile();
    let r = p.r_max();
    let (a, b) = (p.eval(r * (1.0 - 1e-9)), p.eval(r * (1.0 + 1e-9)));
    assert!((a.0 - b.0).abs() < 1e-6 && (a.1 - b.1).abs() < 1e-6);
    let s = p.seam();
    let (a, b) = (p.eval(s * (1.0 - 1e-9)), p.eval(s * (1.0 + 1e-9)));
    assert!((a.0 - b.0).abs() < 1e-8 && (a.1 - b.1).abs() < 1e-7);
    // beyond the table the expansion 1 - 1/(2r²) - 9/(8r⁴) takes over
    let r = p.r_max() + 10.0;
    let asym = 1.0 - 0.5 / (r * r) - 9.0 / (8.0 * r.powi(4));
    assert!((p.eval(r).0 - asym).abs() < 1e-6);
}

#[test]
fn far_coefficients_for_degree_one() {
    let [a, b, _] = profile().far_coefficients();
    assert!((a - 0.5).abs() < 1e-15 && (b - 9.0 / 8.0).abs() < 1e-15);
}

/// Re-integrates the profile ODE from the series start with the solved slope at
/// a much tighter tolerance. The shooting instability grows like `e^{√2 r}`, so
/// the direct comparison is only meaningful at moderate `r`.
#[test]
fn matches_tight_reintegration_near_core() {
    let p = profile();
    let a = p.slope();
    let r0 = R_START;
    let b = 1.0 / 8.0;
    let init = [a * r0 * (1.0 - b * r0 * r0), a * (1.0 - 3.0 * b * r0 * r0)];
    let rhs = |r: f64, y: &[f64], d: &mut [f64]| {
        d[0] = y[1];
        d[1] = -y[1] / r + y[0] / (r * r) - (1.0 - y[0] * y[0]) * y[0];
    };
    let tr = integrate_ode(rhs, (r0, 2.0), &init, Tolerance { rel: 1e-13, abs: 1e-15 }).unwrap();
    let oracle = 1.0 - tr.final_state()[0].powi(2);
    let rel = (p.one_minus_u2(2.0) - oracle).abs() / oracle;
    assert!(rel < 1e-9, "1-U²(2) relative error {rel:.2e}");
}

#[test]
fn matches_tighter_solve_in_far_field() {
    let p = profile();
    let tight = solve_profile(1, 60.0, Tolerance::default().tighter(100.0)).unwrap();
    let rel = (p.one_minus_u2(10.0) - tight.one_minus_u2(10.0)).abs() / tight.one_minus_u2(10.0);
    assert!(rel < 1e-8, "1-U²(10) relative error {rel:.2e}");
    assert!((p.slope() - tight.slope()).abs() < 1e-9);
}

/// `L₂U = 0` (`L₂ = -∂² - ∂/r + n²/r² - (1-U²)`) and `L₁U' > 0`
/// (`L₁ = -∂² - ∂/r + n²/r² - 1 + 3U²`), with `U'''` from differentiating
/// the profile equation.
#[test]
fn resonance_identities() {
    let p = profile();
    for r in logspace(0.05, 50.0, 800) {
        let (u, du, d2u) = p.eval_full(r);
        let l2u = -d2u - du / r + u / (r * r) - (1.0 - u * u) * u;
        assert!(l2u.abs() <= 1e-6, "L2 U = {l2u:.2e} at {r}");
        let d3u = du / (r * r) - d2u / r - 2.0 * u / r.powi(3) + du / (r * r) - (1.0 - 3.0 * u * u) * du;
        let l1du = -d3u - d2u / r + du / (r * r) - (1.0 - 3.0 * u * u) * du;
        assert!(l1du > 0.0, "L1 U' = {l1du:.2e} at {r}");
    }
}

#[test]
fn degree_two_profile() {
    let p = profile_n2();
    assert_eq!(p.degree(), 2);
    assert!(p.bracket_width() <= 1e-10);
    let (u, _) = p.eval(1e-3);
    assert!((u / 1e-6 - p.slope()).abs() / p.slope() < 1e-5);
    let r = 40.0;
    assert!((r * r * p.one_minus_u2(r) - 4.0).abs() < 0.1);
}

#[test]
fn rejects_bad_input() {
    assert!(solve_profile(0, 60.0, Tolerance::default()).is_err());
    assert!(solve_profile(1, 1.0, Tolerance::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn values_stay_in_unit_interval(r in 1e-4f64..200.0) {
        let p = profile();
        let (u, du) = p.eval(r);
        prop_assert!(u > 0.0 && u < 1.0);
        prop_assert!(du > 0.0);
        let w = p.one_minus_u2(r);
        prop_assert!((w - (1.0 - u * u)).abs() < 1e-12);
    }

    #[test]
    fn one_minus_u2_is_decreasing(r in 0.01f64..100.0, step in 0.01f64..5.0) {
        let p = profile();
        prop_assert!(p.one_minus_u2(r + step) < p.one_minus_u2(r));
    }
}
