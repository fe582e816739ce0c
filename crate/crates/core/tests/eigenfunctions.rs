mod common;

use common::{direct_eigenfunction, linspace, logspace, profile, profile_n2, system};
use proptest::prelude::*;
use std::sync::Arc;
use vortex_spectral::eigenfunctions::{inner_series, Region};
use vortex_spectral::prelude::*;

const KINDS: [OperatorKind; 2] = [OperatorKind::H1, OperatorKind::H2];

fn max_rel_error(sys: &EigenSystem, k: f64) -> f64 {
    let rs = linspace(0.1, 20.0, 400);
    let oracle = direct_eigenfunction(sys, k, &rs);
    let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ef = sys.eigenfunction(k).unwrap();
    rs.iter().zip(&oracle).map(|(&r, o)| (ef.value(r) - o).abs()).fold(0.0, f64::max) / scale
}

#[test]
fn agrees_with_direct_integration() {
    for kind in KINDS {
        let sys = system(kind);
        for k in [0.1, 1.0, 5.0] {
            let e = max_rel_error(&sys, k);
            assert!(e <= 1e-6, "{kind:?} k={k}: {e:.2e}");
        }
    }
}

#[test]
fn weyl_normalization_and_size() {
    for kind in KINDS {
        let sys = system(kind);
        for k in [0.2, 1.0, 7.0] {
            let ef = sys.eigenfunction(k).unwrap();
            let w = ef.weyl();
            for r in [ef.seam(), 2.0 * ef.seam(), 10.0 / k] {
                let d = w.wronskian(r) - Complex64::new(0.0, 2.0);
                assert!(d.norm() <= 1e-6, "{kind:?} k={k} r={r}: W off by {:.2e}", d.norm());
            }
            for r in logspace(5.0 / k, 40.0 / k, 30) {
                let m = w.eval(r).0.norm() * k.sqrt();
                assert!((0.5..=2.0).contains(&m), "{kind:?} k={k} r={r}: |Ψ|√k = {m}");
            }
        }
    }
}

#[test]
fn weyl_leading_order_at_seed() {
    let sys = system(OperatorKind::H2);
    for k in [0.5, 1.0, 4.0] {
        let ef = sys.eigenfunction(k).unwrap();
        let r = ef.weyl().r_init();
        let (psi, _) = ef.weyl().eval(r);
        let d = (psi * k.sqrt() - Complex64::from_polar(1.0, k * r)).norm();
        assert!(d <= 2.0 / (k * r), "k={k}: {d:.2e}");
    }
}

/// Raising the seed order shrinks the change at `r_eval` geometrically; the
/// omitted term at `R_init = 40` is `O((kR)^{-j0-1})`.
#[test]
fn weyl_seed_order_insensitivity() {
    let p = profile();
    for kind in KINDS {
        let at = |order: usize| {
            let sys = EigenSystem::new(p.clone(), kind).unwrap().with_weyl_order(order).unwrap();
            sys.weyl_solution(1.0, 0.5).unwrap().eval(0.5).0
        };
        let v: Vec<Complex64> = [2, 4, 6, 8, 12].iter().map(|&j| at(j)).collect();
        let gaps: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        assert!(gaps[0] <= 1e-4, "{kind:?}: {gaps:?}");
        for w in gaps.windows(2) {
            assert!(w[1] < 0.05 * w[0], "{kind:?}: {gaps:?}");
        }
        assert!(gaps[3] <= 1e-8, "{kind:?}: default order vs 12 differ by {:.2e}", gaps[3]);
    }
}

#[test]
fn seam_is_continuous() {
    for kind in KINDS {
        let sys = system(kind);
        for k in [0.1, 1.0, 10.0] {
            let ef = sys.eigenfunction(k).unwrap();
            let s = ef.seam();
            let (fi, dfi) = ef.inner().eval(s, k);
            let (fo, dfo) = ef.eval_outer(s);
            assert!((fi - fo).abs() <= 1e-7 * fi.abs().max(dfi.abs() / k), "{kind:?} k={k} value jump");
            assert!((dfi - dfo).abs() <= 1e-7 * dfi.abs().max(k * fi.abs()), "{kind:?} k={k} derivative jump");
            assert_eq!(ef.region(0.5 * s), Region::Inner);
            assert_eq!(ef.region(2.0 * s), Region::Outer);
        }
    }
}

#[test]
fn first_inner_coefficient_limits() {
    let h2 = system(OperatorKind::H2);
    let h1 = system(OperatorKind::H1);
    let a = profile().slope();
    let r = 1e-3;
    assert!((h2.inner().coefficient(1, r) / (r * r * r) - a / 8.0).abs() < 1e-6);
    assert!((h1.inner().coefficient(1, r) / (r * r * r) - 1.0 / 8.0).abs() < 1e-6);
    // f₀ = U for H₂
    assert!((h2.inner().coefficient(0, 2.0) - profile().eval(2.0).0).abs() < 1e-10);
    // f₁/r² → 1/4 with a log²r/r² correction
    let big = h2.inner().coefficient(1, 100.0) / 1e4;
    assert!((big - 0.25).abs() < 2e-3, "f₁(100)/100² = {big}");
}

#[test]
fn degree_two_inner_coefficient() {
    let sys = EigenSystem::new(profile_n2(), OperatorKind::H1).unwrap();
    let r = 1e-3;
    let v = sys.inner().coefficient(1, r) / r.powi(4);
    assert!((v - 1.0 / 12.0).abs() < 1e-3, "{v}");
}

#[test]
fn zero_frequency_reduces_to_threshold_solution() {
    for kind in KINDS {
        let sys = system(kind);
        for r in [0.01, 0.3, 2.0, 9.0] {
            assert_eq!(sys.inner().eval(r, 0.0).0, sys.inner().term(0, r).0);
            let (phi, _) = sys.basis().phi0(r);
            assert!((sys.inner().eval(r, 0.0).0 - phi).abs() <= 1e-12 * (1.0 + phi.abs()));
        }
    }
    let r = 3.0;
    let (v, _) = phi_global(&system(OperatorKind::H2), r, 0.0).unwrap();
    assert!((v - r.sqrt() * profile().eval(r).0).abs() < 1e-10);
}

/// `-Φ'' + qΦ - k²Φ` with `Φ''` from a centred difference of the derivative.
#[test]
fn eigen_residual() {
    for kind in KINDS {
        let sys = system(kind);
        let p = profile();
        for k in [0.05, 0.5, 1.0, 5.0] {
            let mut worst: f64 = 0.0;
            for r in logspace(0.05, 20.0, 250) {
                let h = 1e-4 * r.min(1.0 / k);
                let d2 = (phi_global(&sys, r + h, k).unwrap().1 - phi_global(&sys, r - h, k).unwrap().1) / (2.0 * h);
                let (y, dy) = phi_global(&sys, r, k).unwrap();
                let q = sys.operator().potential(&p, r);
                let scale = (q.abs() + k * k) * (y.abs() + dy.abs() * r.min(1.0 / k));
                worst = worst.max((q * y - k * k * y - d2).abs() / scale);
            }
            assert!(worst <= 1e-6, "{kind:?} k={k}: {worst:.2e}");
        }
    }
}

/// `|f_j(r)| ≤ C^j r^{2j+1}/(j!(j+1)!)` on `r ≤ 1` with one fitted `C`.
#[test]
fn inner_coefficients_decay_factorially() {
    for kind in KINDS {
        let sys = system(kind);
        let inner = sys.inner();
        let f0 = inner.coefficient(0, 1.0).abs().max(1e-300);
        let mut fitted = Vec::new();
        let mut fact = 1.0;
        for j in 1..=inner.order() {
            fact *= (j * (j + 1)) as f64;
            let c = logspace(1e-3, 1.0, 40)
                .into_iter()
                .map(|r| (inner.coefficient(j, r).abs() / f0 * fact / r.powi(2 * j as i32 + 1)).powf(1.0 / j as f64))
                .fold(0.0, f64::max);
            fitted.push(c);
        }
        let c_max = fitted.iter().cloned().fold(0.0, f64::max);
        assert!(c_max < 10.0, "{kind:?}: C_j = {fitted:?}");
        // the rate does not drift upward with j
        assert!(fitted[fitted.len() - 1] <= 1.5 * fitted[2], "{kind:?}: {fitted:?}");
    }
}

#[test]
fn series_tables_can_be_rebuilt() {
    let sys = system(OperatorKind::H2);
    let basis = Arc::new(vortex_spectral::zero_modes::zero_basis_h2(&profile()).unwrap());
    let short = inner_series(basis, 6).unwrap();
    assert_eq!(short.order(), 6);
    for j in 0..=6 {
        assert_eq!(short.coefficient(j, 0.7), sys.inner().coefficient(j, 0.7));
    }
    assert!(inner_series(Arc::new(vortex_spectral::zero_modes::zero_basis_h2(&profile()).unwrap()), 0).is_err());
}

#[test]
fn rejects_bad_input() {
    let sys = system(OperatorKind::H1);
    assert!(sys.eigenfunction(0.0).is_err());
    assert!(sys.eigenfunction(-1.0).is_err());
    assert!(phi_global(&sys, -1.0, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn connection_wronskians_agree(k in 0.02f64..20.0, h1 in any::<bool>()) {
        let sys = system(if h1 { OperatorKind::H1 } else { OperatorKind::H2 });
        let ef = sys.eigenfunction(k).unwrap();
        prop_assert!(ef.spread() <= 1e-5);
        // Φ = 2 Re(a Ψ) in the outer region
        let r = 3.0 * ef.seam();
        let psi = ef.weyl().eval(r).0;
        let direct = 2.0 * (ef.a_conn() * psi).re;
        prop_assert!((ef.value(r) - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
    }
}
