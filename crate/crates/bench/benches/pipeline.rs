use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use std::sync::Arc;
use std::time::Duration;
use vortex_spectral::numerics::Grid;
use vortex_spectral::prelude::*;
use vortex_spectral_bench::reference_profile;

fn profile_solve(c: &mut Criterion) {
    c.bench_function("solve_profile r_max=60", |b| b.iter(|| reference_profile(black_box(60.0))));
}

fn eigenfunctions(c: &mut Criterion) {
    let p = Arc::new(reference_profile(60.0));
    let mut g = c.benchmark_group("eigen_system");
    g.sample_size(10);
    g.bench_function("build H1", |b| b.iter(|| EigenSystem::new(p.clone(), OperatorKind::H1).unwrap()));
    let sys = EigenSystem::new(p.clone(), OperatorKind::H1).unwrap();
    for k in [0.1, 1.0, 10.0] {
        g.bench_function(format!("connection coefficient k={k}"), |b| b.iter(|| connection_coefficient(&sys, black_box(k)).unwrap()));
    }
    let grid = Grid::log_uniform(0.05, 20.0, 40).unwrap();
    g.bench_function("measure 40 nodes", |b| b.iter(|| build_measure(&sys, &grid).unwrap()));
    g.finish();
}

fn transform(c: &mut Criterion) {
    let p = Arc::new(reference_profile(60.0));
    let sys = Arc::new(EigenSystem::new(p, OperatorKind::H2).unwrap());
    let cfg = PlanConfig { k_max: 20.0, r_max: 20.0, extent: 5.0, r_breaks: vec![1.5, 4.5], ..Default::default() };
    let mut g = c.benchmark_group("transform");
    g.sample_size(10).measurement_time(Duration::from_secs(20));
    g.bench_function("plan k_max=20 r_max=20", |b| b.iter(|| SpectralPlan::new(sys.clone(), cfg.clone()).unwrap()));
    let plan = SpectralPlan::new(sys, cfg).unwrap();
    let f = plan.sample_bump(&Bump::new(3.0, 1.5).unwrap());
    g.bench_function("forward", |b| b.iter(|| plan.forward(&f).unwrap()));
    let spec = plan.forward(&f).unwrap();
    g.bench_function("inverse", |b| b.iter_batched(|| spec.clone(), |s| plan.inverse(&s).unwrap(), BatchSize::SmallInput));
    g.finish();
}

fn spectrum(c: &mut Criterion) {
    let p = reference_profile(400.0);
    let mut g = c.benchmark_group("spectrum");
    g.sample_size(10);
    g.bench_function("lt_bound gamma=2", |b| b.iter(|| lt_bound(&p, black_box(2.0)).unwrap()));
    g.finish();
}

criterion_group!(benches, profile_solve, eigenfunctions, transform, spectrum);
criterion_main!(benches);
