use crate::output::Artifact;
use crate::{
    CliError, DecayArgs, EigenfnArgs, EigenvaluesArgs, EvolveArgs, FlowArgs, LtArgs, MeasureArgs, ProfileArgs, TransformArgs,
    VortexArgs, ZeroModesArgs,
};
use serde::Serialize;
use std::result::Result;
use std::sync::Arc;
use vortex_spectral::evolution::{decay_report, evolve as run_evolution};
use vortex_spectral::numerics::{Grid, Tolerance};
use vortex_spectral::prelude::*;
use vortex_spectral::spectrum::lt_bound_with;
use vortex_spectral::zero_modes::zero_basis_n;

/// Profile extent used by every command that does not choose its own.
const DEFAULT_PROFILE_R_MAX: f64 = 60.0;

fn profile(a: &ProfileArgs, r_max: f64) -> Result<Arc<VortexProfile>, CliError> {
    let tol = Tolerance::new(a.rel, a.abs)?;
    Ok(Arc::new(solve_profile(a.degree, r_max, tol)?))
}

fn operator(s: &str) -> Result<OperatorKind, CliError> {
    Ok(s.parse::<OperatorKind>()?)
}

fn bump(r0: f64, width: f64, power: u32) -> Result<Bump, CliError> {
    if power < 3 {
        return Err(CliError::Config(format!("bump power must be at least 3 (got {power})")));
    }
    Ok(Bump::new(r0, width)?.with_power(power))
}

fn count(points: usize) -> Result<usize, CliError> {
    if points < 2 {
        return Err(CliError::Config(format!("need at least 2 output points (got {points})")));
    }
    Ok(points)
}

pub fn vortex(a: &VortexArgs) -> Result<(), CliError> {
    let p = profile(&a.profile, a.r_max)?;
    let n = count(a.points)?;
    let mut art = Artifact::new("vortex", a);
    art.set("slope", p.slope()).set("bracket_width", p.bracket_width()).set("degree", p.degree());
    let grid = Grid::uniform(0.0, a.r_max, n)?;
    let rows = grid.nodes().iter().map(|&r| {
        let (u, du) = p.eval(r);
        vec![r, u, du, p.one_minus_u2(r)]
    });
    art.write_csv(&a.out, &["r", "U", "dU", "one_minus_U2"], rows)?;
    eprintln!("U'(0) = {:.12} (bracket width {:.2e}) -> {}", p.slope(), p.bracket_width(), a.out);
    Ok(())
}

pub fn zero_modes(a: &ZeroModesArgs) -> Result<(), CliError> {
    let p = profile(&a.profile, DEFAULT_PROFILE_R_MAX)?;
    let kind = operator(&a.operator)?;
    let b = zero_basis_n(&p, kind, a.profile.degree)?;
    let grid = Grid::log_uniform(a.r_min, a.r_max, count(a.points)?)?;
    let mut art = Artifact::new("zero-modes", a);
    art.set("operator", format!("{kind:?}"));
    if let Some(eta) = b.eta0() {
        art.set("eta0", eta);
    }
    if let Some(c) = b.constants() {
        art.set("c", c).set("c2c3_minus_c1c4", b.constant_relation());
    }
    let rows = grid.nodes().iter().map(|&r| {
        let (phi, dphi) = b.phi0(r);
        let (theta, dtheta) = b.theta0(r);
        vec![r, phi, dphi, theta, dtheta, b.wronskian(r)]
    });
    art.write_csv(&a.out, &["r", "phi0", "dphi0", "theta0", "dtheta0", "wronskian"], rows)?;
    eprintln!("zero-energy pair for {kind:?} -> {}", a.out);
    Ok(())
}

pub fn eigenfn(a: &EigenfnArgs) -> Result<(), CliError> {
    let p = profile(&a.profile, DEFAULT_PROFILE_R_MAX)?;
    let sys = EigenSystem::new(p, operator(&a.operator)?)?;
    if !(a.r_min >= 0.0 && a.r_max > a.r_min) {
        return Err(CliError::Config(format!("need 0 <= r-min < r-max (got {}, {})", a.r_min, a.r_max)));
    }
    let ef = sys.eigenfunction_to(a.k, a.r_max)?;
    let grid = Grid::uniform(a.r_min, a.r_max, count(a.points)?)?;
    let mut art = Artifact::new("eigenfn", a);
    let conn = ef.a_conn();
    art.set("a", [conn.re, conn.im]).set("abs_a", conn.norm()).set("wronskian_spread", ef.spread()).set("seam", ef.seam());
    let rows = grid.nodes().iter().map(|&r| vec![r, ef.value(r)]);
    art.write_csv(&a.out, &["r", "phi"], rows)?;
    eprintln!("|a({})| = {:.10} -> {}", a.k, conn.norm(), a.out);
    Ok(())
}

pub fn measure(a: &MeasureArgs) -> Result<(), CliError> {
    let p = profile(&a.profile, DEFAULT_PROFILE_R_MAX)?;
    let sys = EigenSystem::new(p, operator(&a.operator)?)?;
    let grid = Grid::log_uniform(a.k_min, a.k_max, count(a.points)?)?;
    let m = build_measure(&sys, &grid)?;
    let (lo, hi) = m.band();
    let mut art = Artifact::new("measure", a);
    art.set("band", [lo, hi]).set("band_ratio", hi / lo).set("max_spread", m.max_spread());
    let weighted = m.weighted_magnitudes();
    let rows = (0..m.k_grid().len()).map(|i| {
        let av = m.a_values()[i];
        vec![m.k_grid()[i], av.re, av.im, weighted[i], m.density()[i], m.spreads()[i]]
    });
    art.write_csv(&a.out, &["k", "re_a", "im_a", "weighted_abs_a", "density", "spread"], rows)?;
    eprintln!("<k>^n |a| in [{lo:.6}, {hi:.6}] -> {}", a.out);
    Ok(())
}

pub fn transform(a: &TransformArgs) -> Result<(), CliError> {
    let p = profile(&a.profile, DEFAULT_PROFILE_R_MAX)?;
    let sys = Arc::new(EigenSystem::new(p, operator(&a.operator)?)?);
    let b = bump(a.bump.r0, a.bump.width, a.bump.power)?;
    let (lo, hi) = b.support();
    let cfg = PlanConfig { k_max: a.k_max, r_max: a.r_max, extent: hi, r_breaks: vec![lo.max(0.0), hi], ..Default::default() };
    let plan = SpectralPlan::new(sys, cfg)?;
    let f = plan.sample_bump(&b);
    let spec = plan.forward(&f)?;
    let back = plan.inverse(&spec)?;
    let err = back.sub(&f)?.l2_norm() / f.l2_norm();
    let mut art = Artifact::new("transform", a);
    art.set("round_trip_rel_err", err)
        .set("parseval_ratio", spec.l2_norm() / f.l2_norm())
        .set("tail_indicator", spec.tail_indicator())
        .set("k_nodes", spec.k_grid().len());
    let rows = spec.k_grid().iter().zip(spec.values()).map(|(&k, v)| vec![k, v.re, v.im]);
    art.write_csv(&a.out, &["k", "re_F", "im_F"], rows)?;
    eprintln!("round trip rel err {err:.3e} -> {}", a.out);
    Ok(())
}

fn flow_spec(a: &FlowArgs, times: &[f64]) -> Result<EvolutionSpec, CliError> {
    let flow = Flow::parse(&a.flow)?;
    let kind = match &a.operator {
        Some(s) => operator(s)?,
        None if flow == Flow::KleinGordon => OperatorKind::H1,
        None => OperatorKind::H2,
    };
    let f = InitialData::bump(bump(a.bump.r0, a.bump.width, a.bump.power)?);
    let mut spec = EvolutionSpec::new(flow, kind, f, times.to_vec());
    if let (Some(r0), Some(w)) = (a.g_r0, a.g_width) {
        spec = spec.with_velocity(InitialData::bump(bump(r0, w, a.bump.power)?));
    }
    if let Some(r) = a.r_max {
        spec = spec.with_r_max(r);
    }
    if let Some(k) = a.k_max {
        spec = spec.with_k_max(k);
    }
    spec.validate()?;
    Ok(spec)
}

fn evolve_spec(p: &ProfileArgs, spec: &EvolutionSpec) -> Result<vortex_spectral::evolution::Evolution, CliError> {
    let prof = profile(p, DEFAULT_PROFILE_R_MAX)?;
    let sys = Arc::new(EigenSystem::new(prof, spec.operator)?);
    Ok(run_evolution(sys, spec)?)
}

pub fn evolve(a: &EvolveArgs) -> Result<(), CliError> {
    let spec = flow_spec(&a.flow, &a.times)?;
    let ev = evolve_spec(&a.profile, &spec)?;
    let mut art = Artifact::new("evolve", a);
    art.set("flow", ev.flow.name()).set("operator", format!("{:?}", ev.operator)).set("tail_indicator", ev.tail);
    if let Some(e) = &ev.energies {
        art.set("energies", e);
    }
    if let Some(h) = &ev.half_wave_sup {
        art.set("half_wave_sup", h);
    }
    let names: Vec<String> = std::iter::once("r".to_string()).chain(ev.times.iter().map(|t| format!("v_t{t}"))).collect();
    let cols: Vec<&str> = names.iter().map(String::as_str).collect();
    let r = ev.solutions[0].grid().nodes();
    let rows = (0..r.len()).map(|i| std::iter::once(r[i]).chain(ev.solutions.iter().map(|s| s.values()[i])).collect());
    art.write_csv(&a.out, &cols, rows)?;
    eprintln!("{} solutions -> {}", ev.solutions.len(), a.out);
    Ok(())
}

pub fn decay(a: &DecayArgs) -> Result<(), CliError> {
    let spec = flow_spec(&a.flow, &a.times)?;
    let ev = evolve_spec(&a.profile, &spec)?;
    let rep = decay_report(ev.flow, &ev.times, &ev.solutions)?;
    let mut art = Artifact::new("decay-report", a);
    art.set("weighted_growth", rep.weighted_growth());
    art.write_json(&a.out, &rep)?;
    eprintln!("exponent {:.4}, t·sup max/min {:.3} -> {}", rep.exponent, rep.t_sup_ratio, a.out);
    Ok(())
}

#[derive(Serialize)]
struct LtReport {
    gamma: f64,
    r0: f64,
    r1: f64,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "R_tail")]
    r_tail: f64,
    tail_constant: f64,
    trace_bound: f64,
    lambda0: f64,
    a_bracket_error: f64,
}

impl From<LtBoundResult> for LtReport {
    fn from(l: LtBoundResult) -> Self {
        Self {
            gamma: l.gamma,
            r0: l.r0,
            r1: l.r1,
            a: l.a_integral,
            r_tail: l.r_tail,
            tail_constant: l.tail_constant,
            trace_bound: l.trace_bound,
            lambda0: l.lambda0,
            a_bracket_error: l.a_bracket_error,
        }
    }
}

pub fn lt(a: &LtArgs) -> Result<(), CliError> {
    let p = solve_profile(1, a.r_max, Tolerance::default())?;
    let claimed = lt_bound_with(&p, a.gamma, a.r1, vortex_spectral::spectrum::TAIL_CLAIM)?;
    let mut art = Artifact::new("lt-bound", a);
    if a.r_max >= 400.0 {
        let tail = verify_tail_claim(&p)?;
        let sharp = lt_bound_with(&p, a.gamma, a.r1, tail.max)?;
        art.set("tail_claim", tail).set("with_measured_tail", LtReport::from(sharp));
    }
    art.write_json(&a.out, LtReport::from(claimed))?;
    eprintln!("lambda0 = {:.6} (trace bound {:.6}) -> {}", claimed.lambda0, claimed.trace_bound, a.out);
    Ok(())
}

pub fn eigenvalues(a: &EigenvaluesArgs) -> Result<(), CliError> {
    let p = solve_profile(1, a.r_max, Tolerance::default())?;
    let ev = find_eigenvalues(&p, a.count, a.r_big)?;
    let art = Artifact::new("eigenvalues", a);
    art.write_json(&a.out, &ev)?;
    if ev.values.len() < a.count {
        eprintln!(
            "found {} of {} requested eigenvalues; the rest lie above the resolvable limit {:.6} for R_big = {}",
            ev.values.len(),
            a.count,
            ev.resolvable_limit,
            a.r_big
        );
    }
    eprintln!("eigenvalues {:?} -> {}", ev.values, a.out);
    Ok(())
}
