mod common;

use common::system;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use vortex_spectral::prelude::*;
use vortex_spectral::transform::{fourier_norms, normalized_spectrum, NormWeight};

/// Stored `H₂` plan wide enough for bumps supported in `[0, 8]`.
fn h2_plan() -> &'static SpectralPlan {
    static P: OnceLock<SpectralPlan> = OnceLock::new();
    P.get_or_init(|| {
        let cfg = PlanConfig { k_max: 40.0, r_max: 20.0, extent: 8.0, ..Default::default() };
        SpectralPlan::new(system(OperatorKind::H2), cfg).unwrap()
    })
}

fn h1_plan() -> &'static SpectralPlan {
    static P: OnceLock<SpectralPlan> = OnceLock::new();
    P.get_or_init(|| {
        let cfg = PlanConfig { k_max: 20.0, r_max: 40.0, extent: 5.0, r_breaks: vec![1.5, 4.5], ..Default::default() };
        SpectralPlan::new(system(OperatorKind::H1), cfg).unwrap()
    })
}

fn rel(a: &FieldSample, b: &FieldSample) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

#[test]
fn cutoffs_form_a_partition() {
    let c = BandCutoffs;
    for i in 0..4000 {
        let x = 1e-3 * 1.003f64.powi(i);
        let s: f64 = (-20..=20).map(|l| c.band(l, x)).sum();
        assert!((s - 1.0).abs() <= 1e-12, "sum {s} at {x}");
    }
    assert_eq!(c.base(1.2), 1.0);
    assert_eq!(c.base(1.7), 0.0);
    assert_eq!(c.base(-1.0), 1.0);
    for l in -3..=4 {
        let (lo, hi) = c.support(l);
        let scale = 2f64.powi(l);
        assert!((lo - 0.625 * scale).abs() < 1e-15 && (hi - 1.6 * scale).abs() < 1e-15);
        assert_eq!(c.band(l, lo * 0.999), 0.0);
        assert_eq!(c.band(l, hi * 1.001), 0.0);
        assert!(c.band(l, scale) > 0.99);
    }
}

#[test]
fn forward_is_linear_and_zero_maps_to_zero() {
    let plan = h2_plan();
    let f = plan.sample_bump(&Bump::new(3.0, 1.5).unwrap());
    let g = plan.sample_bump(&Bump::new(5.0, 2.0).unwrap());
    let h = f.scale(2.0).add(&g.scale(-0.5)).unwrap();
    let (ff, fg, fh) = (plan.forward(&f).unwrap(), plan.forward(&g).unwrap(), plan.forward(&h).unwrap());
    let scale = fh.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    for ((a, b), c) in ff.values().iter().zip(fg.values()).zip(fh.values()) {
        assert!((2.0 * a - 0.5 * b - c).norm() <= 1e-13 * scale);
    }
    let zero = plan.sample(|_| 0.0);
    assert!(plan.forward(&zero).unwrap().values().iter().all(|v| v.norm() == 0.0));
    assert!(plan.round_trip(&zero).unwrap().values().iter().all(|&v| v == 0.0));
}

#[test]
fn diagonalization() {
    for kind in [OperatorKind::H2, OperatorKind::H1] {
        let sys = system(kind);
        let cfg = PlanConfig { k_max: 40.0, r_max: 20.0, extent: 5.0, r_breaks: vec![1.5, 4.5], ..Default::default() };
        let plan = SpectralPlan::new(sys.clone(), cfg).unwrap();
        let b = Bump::new(3.0, 1.5).unwrap();
        let f = plan.sample_bump(&b);
        let hf = plan.sample(|r| b.apply_operator(&sys, r)).with_support(1.5, 4.5);
        let (sf, shf) = (plan.forward(&f).unwrap(), plan.forward(&hf).unwrap());
        let sigma = sys.operator().threshold();
        let mut worst: f64 = 0.0;
        let mut top: f64 = 0.0;
        for ((&k, a), b) in sf.k_grid().iter().zip(sf.values()).zip(shf.values()) {
            worst = worst.max((b - a * (k * k + sigma)).norm());
            top = top.max(b.norm());
        }
        assert!(worst / top <= 1e-4, "{kind:?}: {:.2e}", worst / top);
    }
}

#[test]
fn h2_round_trip_and_parseval() {
    let plan = h2_plan();
    let f = plan.sample_bump(&Bump::new(3.0, 1.5).unwrap());
    let spec = plan.forward(&f).unwrap();
    let back = plan.inverse(&spec).unwrap();
    assert!(rel(&back, &f) <= 1e-3, "round trip {:.2e}", rel(&back, &f));
    let parseval = spec.l2_norm() / f.l2_norm() - 1.0;
    assert!(parseval.abs() <= 1e-3, "Parseval {parseval:.2e}");
    assert!(spec.tail_indicator() < 1e-2);
}

#[test]
fn h1_round_trip_is_a_projection() {
    let plan = h1_plan();
    let f = plan.sample_bump(&Bump::new(3.0, 1.5).unwrap());
    let p = plan.round_trip(&f).unwrap();
    let pp = plan.round_trip(&p).unwrap();
    assert!(rel(&pp, &p) <= 2e-3, "idempotence {:.2e}", rel(&pp, &p));
    // the discrete eigenfunctions carry part of the norm, so P_c f ≠ f
    assert!(rel(&p, &f) > 1e-2);
    assert!(p.l2_norm() < f.l2_norm());
}

#[test]
fn randomized_bumps_round_trip() {
    let plan = h2_plan();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let w = rng.gen_range(0.75..2.0);
        let r0 = rng.gen_range(w..8.0 - w);
        let f = plan.sample_bump(&Bump::new(r0, w).unwrap().with_power(rng.gen_range(3..6)));
        let e = rel(&plan.round_trip(&f).unwrap(), &f);
        assert!(e <= 1e-3, "bump ({r0:.3}, {w:.3}): {e:.2e}");
    }
}

#[test]
fn band_projections() {
    // Band-limited data: f = inverse(χ · forward(bump)), χ = Σ_{ℓ=-1..2} φ_ℓ.
    let sys = system(OperatorKind::H2);
    let cfg = PlanConfig { k_min: 0.03, k_max: 8.0, r_max: 100.0, extent: 5.0, r_breaks: vec![1.5, 4.5], ..Default::default() };
    let plan = SpectralPlan::new(sys, cfg).unwrap();
    let bump = plan.sample_bump(&Bump::new(3.0, 1.5).unwrap());
    let chi = plan.forward(&bump).unwrap().multiply(|k| Complex64::new(BandCutoffs.band_sum(-1, 2, k), 0.0));
    let f = plan.inverse(&chi).unwrap();
    let bands: Vec<i32> = (-4..=5).collect();
    let parts = plan.project_bands(&bands, &f).unwrap();
    let mut sum = plan.sample(|_| 0.0);
    for p in &parts {
        sum = sum.add(p).unwrap();
    }
    let target = plan.round_trip(&f).unwrap();
    assert!(rel(&sum, &target) <= 2e-3, "partition {:.2e}", rel(&sum, &target));
    // a single projection agrees with the batched one
    let p1 = plan.project_band(1, &f).unwrap();
    assert!(rel(&p1, &parts[5]) < 1e-12);
}

#[test]
fn distant_bands_are_orthogonal() {
    let sys = system(OperatorKind::H2);
    let (l, lp) = (0, 2);
    let (a1, b1) = BandCutoffs.support(l);
    let (a2, b2) = BandCutoffs.support(lp);
    let cfg = PlanConfig {
        k_min: a1.min(a2),
        k_max: b1.max(b2),
        r_max: 100.0,
        extent: 5.0,
        r_breaks: vec![1.5, 4.5],
        bands: Some((l, lp)),
        store_limit: 0,
        ..Default::default()
    };
    let plan = SpectralPlan::new(sys, cfg).unwrap();
    assert!(!plan.is_stored());
    let f = plan.sample_bump(&Bump::new(3.0, 1.5).unwrap());
    let g = plan.project_band(lp, &f).unwrap();
    let h = plan.project_band(l, &g).unwrap();
    let ratio = h.l2_norm() / f.l2_norm();
    assert!(ratio <= 1e-6, "‖P_0 P_2 f‖/‖f‖ = {ratio:.2e}");
}

#[test]
fn weighted_norms_scale_and_converge() {
    let sys = system(OperatorKind::H2);
    let b = [Bump::new(3.0, 1.5).unwrap().with_power(8)];
    let w = [NormWeight::bracket(0.0), NormWeight::bracket(1.0), NormWeight::bracket(1.0)];
    let s1 = normalized_spectrum(&sys, &b, 0.05, 200).unwrap();
    let n1 = fourier_norms(&s1, w);
    let doubled = [b[0].scaled(2.0)];
    let n2 = fourier_norms(&normalized_spectrum(&sys, &doubled, 0.05, 200).unwrap(), w);
    for (x, y) in [(n1.sup, n2.sup), (n1.d1, n2.d1), (n1.d2, n2.d2)] {
        assert!((y - 2.0 * x).abs() <= 1e-12 * y);
    }
    // ∂_k F is square integrable: halving dk barely moves the norm
    let fine = fourier_norms(&normalized_spectrum(&sys, &b, 0.025, 400).unwrap(), w);
    assert!(n1.d1.is_finite() && (fine.d1 - n1.d1).abs() <= 1e-2 * fine.d1, "{} vs {}", n1.d1, fine.d1);
}

#[test]
fn sup_of_normalized_spectrum_is_controlled_by_l1() {
    let sys = system(OperatorKind::H2);
    let plan = h2_plan();
    let mut ratios = Vec::new();
    for w in [0.25, 0.5, 1.0, 2.0, 3.0] {
        let b = [Bump::new(w + 1.0, w).unwrap()];
        let sup = fourier_norms(&normalized_spectrum(&sys, &b, 0.05, 200).unwrap(), [NormWeight::bracket(0.0); 3]).sup;
        ratios.push(sup / plan.sample_bump(&b[0]).l1_norm());
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo <= 5.0, "‖F‖∞/‖f‖₁ across widths: {ratios:?}");
}

#[test]
fn threshold_moment_cancellation() {
    let sys = system(OperatorKind::H1);
    let b = vec![Bump::new(1.0, 0.8).unwrap(), Bump::new(3.0, 1.0).unwrap()];
    let c = vortex_spectral::transform::cancel_threshold_moment(&sys, &b).unwrap();
    let m = vortex_spectral::transform::threshold_moment(&sys, &c).unwrap();
    let scale = vortex_spectral::transform::threshold_moment(&sys, &b[..1]).unwrap().abs();
    assert!(m.abs() <= 1e-12 * scale);
    assert!(vortex_spectral::transform::cancel_threshold_moment(&sys, &b[..1]).is_err());
}

#[test]
fn rejects_bad_input() {
    assert!(Bump::new(1.0, 0.0).is_err());
    assert!(Bump::new(0.5, 1.0).is_err());
    let plan = h2_plan();
    let short = plan.forward(&plan.sample(|_| 1.0)).unwrap();
    assert!(short.with_values(vec![Complex64::new(0.0, 0.0); 3]).is_err());
    assert!(plan.synthesize(&[vec![Complex64::new(0.0, 0.0); 3]]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_of_unity_pointwise(x in 1e-4f64..1e4) {
        let s: f64 = (-20..=20).map(|l| BandCutoffs.band(l, x)).sum();
        prop_assert!((s - 1.0).abs() <= 1e-12);
        let inside: Vec<i32> = (-20..=20).filter(|&l| BandCutoffs.band(l, x) > 0.0).collect();
        prop_assert!(inside.len() <= 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn round_trip_over_random_bumps(w in 0.75f64..2.0, t in 0.0f64..1.0) {
        let plan = h2_plan();
        let r0 = w + t * (8.0 - 2.0 * w);
        let f = plan.sample_bump(&Bump::new(r0, w).unwrap());
        prop_assert!(rel(&plan.round_trip(&f).unwrap(), &f) <= 1e-3);
    }
}
