//! Recomputes the published golden numbers and prints one row per check.

use crate::output::{emit, Artifact};
use crate::{CliError, ReproduceArgs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::result::Result;
use std::sync::Arc;
use vortex_spectral::numerics::{Grid, Tolerance};
use vortex_spectral::prelude::*;
use vortex_spectral::zero_modes::{zero_basis_h1, zero_basis_h2};

pub const GROUPS: [&str; 7] = ["vortex", "zero-modes", "eigenfn", "measure", "transform", "lt", "n2"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub group: String,
    pub name: String,
    pub value: f64,
    pub target: String,
    pub pass: bool,
}

struct Table {
    group: &'static str,
    rows: Vec<Row>,
}

impl Table {
    fn push(&mut self, name: &str, value: f64, target: &str, pass: bool) {
        self.rows.push(Row { group: self.group.into(), name: name.into(), value, target: target.into(), pass });
    }

    fn near(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        self.push(name, value, &format!("{target} ± {tol:e}"), (value - target).abs() <= tol);
    }

    fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, &format!("≤ {}", show(bound)), value <= bound);
    }
}

/// Fixed notation for moderate magnitudes, scientific for tiny ones.
fn show(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.4e}")
    } else {
        format!("{x:.10}")
    }
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

fn vortex(t: &mut Table, p: &VortexProfile) {
    t.near("U'(0)", p.slope(), 0.5832, 1e-3);
    t.at_most("bracket width", p.bracket_width(), 1e-10);
}

fn zero_modes(t: &mut Table, p: &VortexProfile) -> vortex_spectral::Result<()> {
    let h2 = zero_basis_h2(p)?;
    let h1 = zero_basis_h1(p, 20.0)?;
    let rs = logspace(0.05, 30.0, 600);
    for (name, b) in [("H2 Wronskian drift", &h2), ("H1 Wronskian drift", &h1)] {
        t.at_most(name, rs.iter().map(|&r| (b.wronskian(r) - 1.0).abs()).fold(0.0, f64::max), 1e-8);
    }
    let rel = h1.constant_relation().unwrap_or(f64::NAN);
    t.near("c2c3 - c1c4", rel, std::f64::consts::FRAC_1_SQRT_2, 1e-5);
    t.near("log frequency of Φ₁⁽⁰⁾/√r", h1.fit_log_frequency(50.0, 1500.0)?, 2f64.sqrt(), 1e-3);
    Ok(())
}

fn eigenfn(t: &mut Table, p: &Arc<VortexProfile>) -> vortex_spectral::Result<()> {
    let h1 = EigenSystem::new(p.clone(), OperatorKind::H1)?;
    let h2 = EigenSystem::new(p.clone(), OperatorKind::H2)?;
    let r = 1e-3;
    t.near("H1 f₁(r)/r³ at r = 1e-3", h1.inner().coefficient(1, r) / r.powi(3), 0.125, 1e-6);
    t.near("H2 f₁(r)/r³ / U'(0) at r = 1e-3", h2.inner().coefficient(1, r) / r.powi(3) / p.slope(), 0.125, 1e-5);
    t.near("H2 f₁(r)/r² at r = 100", h2.inner().coefficient(1, 100.0) / 1e4, 0.25, 2e-3);
    for (name, sys) in [("H1 Wronskian of Ψ at k = 1", &h1), ("H2 Wronskian of Ψ at k = 1", &h2)] {
        let ef = sys.eigenfunction(1.0)?;
        let w = ef.weyl().wronskian(ef.seam());
        t.at_most(name, (w - Complex64::new(0.0, 2.0)).norm(), 1e-6);
    }
    Ok(())
}

fn measure(t: &mut Table, p: &Arc<VortexProfile>) -> vortex_spectral::Result<()> {
    let grid = Grid::log_uniform(0.05, 20.0, 160)?;
    for (label, kind) in [("H1", OperatorKind::H1), ("H2", OperatorKind::H2)] {
        let m = build_measure(&EigenSystem::new(p.clone(), kind)?, &grid)?;
        let (lo, hi) = m.band();
        t.at_most(&format!("{label} band ratio M/m of <k>|a|"), hi / lo, 10.0);
        t.at_most(&format!("{label} Wronskian spread"), m.max_spread(), 1e-5);
    }
    Ok(())
}

fn transform(t: &mut Table, p: &Arc<VortexProfile>, seed: u64) -> vortex_spectral::Result<()> {
    let sys = Arc::new(EigenSystem::new(p.clone(), OperatorKind::H2)?);
    let plan = SpectralPlan::new(sys.clone(), PlanConfig { k_max: 40.0, r_max: 20.0, extent: 8.0, ..Default::default() })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let w = rng.gen_range(0.75..2.0);
        let r0 = rng.gen_range(w..8.0 - w);
        let f = plan.sample_bump(&Bump::new(r0, w)?.with_power(rng.gen_range(3..6)));
        worst = worst.max(plan.round_trip(&f)?.sub(&f)?.l2_norm() / f.l2_norm());
    }
    t.at_most("H2 round trip, 10 random bumps", worst, 1e-3);
    let b = Bump::new(3.0, 1.5)?;
    let sf = plan.forward(&plan.sample_bump(&b))?;
    let shf = plan.forward(&plan.sample(|r| b.apply_operator(&sys, r)).with_support(1.5, 4.5))?;
    let sigma = sys.operator().threshold();
    let (mut err, mut top) = (0.0f64, 0.0f64);
    for ((&k, a), h) in sf.k_grid().iter().zip(sf.values()).zip(shf.values()) {
        err = err.max((h - a * (k * k + sigma)).norm());
        top = top.max(h.norm());
    }
    t.at_most("H2 diagonalization", err / top, 1e-4);
    Ok(())
}

fn lt(t: &mut Table) -> vortex_spectral::Result<()> {
    let p = solve_profile(1, 400.0, Tolerance::default())?;
    let l = lt_bound(&p, 2.0)?;
    t.near("r0", l.r0, 0.614489, 1e-3);
    t.near("A/6", l.a_integral / 6.0, 0.44515, 0.005);
    t.at_most("R", l.r_tail, 0.00127);
    t.at_most("trace bound", l.trace_bound, 0.446);
    t.near("lambda0", l.lambda0, 1.3326, 0.003);
    let tail = verify_tail_claim(&p)?;
    t.push("max r²(1-U²) on [7, 400]", tail.max, "in [1.0, 1.1]", (1.0..=1.1).contains(&tail.max));
    t.push("barrier max on [7, 400]", tail.barrier_max, "< 0", tail.barrier_max < 0.0);
    let s = susy_positivity(&p, &logspace(0.01, 50.0, 4000))?;
    t.push("min of the factorized potential", s.min, "> 0", s.min > 0.0);
    let ev = find_eigenvalues(&p, 4, 150.0)?;
    t.push("eigenvalues found below 2", ev.values.len() as f64, "≥ 2", ev.values.len() >= 2);
    for (i, v) in ev.values.iter().enumerate() {
        t.push(&format!("eigenvalue {}", i + 1), *v, "in (lambda0, 2)", *v > l.lambda0 && *v < 2.0);
    }
    t.push("sign changes at or below 0", ev.nonpositive_crossings as f64, "0", ev.nonpositive_crossings == 0);
    Ok(())
}

fn n2(t: &mut Table) -> vortex_spectral::Result<()> {
    let p = Arc::new(solve_profile(2, 60.0, Tolerance::default())?);
    let sys = EigenSystem::new(p, OperatorKind::H1)?;
    let r = 1e-3;
    t.near("f₁(r)/r⁴ for n = 2", sys.inner().coefficient(1, r) / r.powi(4), 1.0 / 12.0, 1e-3);
    let m = build_measure(&sys, &Grid::log_uniform(0.05, 20.0, 80)?)?;
    let (lo, hi) = m.band();
    t.at_most("band ratio M/m of <k>²|a| for n = 2", hi / lo, 10.0);
    Ok(())
}

pub fn run(a: &ReproduceArgs) -> Result<(), CliError> {
    let groups: Vec<&'static str> = match &a.only {
        Some(g) => match GROUPS.iter().find(|x| **x == g.as_str()) {
            Some(x) => vec![*x],
            None => return Err(CliError::Config(format!("unknown group '{g}' (expected one of {})", GROUPS.join(", ")))),
        },
        None => GROUPS.to_vec(),
    };
    let needs_profile = groups.iter().any(|g| !matches!(*g, "lt" | "n2"));
    let p = if needs_profile { Some(Arc::new(solve_profile(1, 60.0, Tolerance::default())?)) } else { None };
    let mut rows = Vec::new();
    for g in groups {
        let mut t = Table { group: g, rows: Vec::new() };
        let prof = || p.clone().expect("profile for this group");
        match g {
            "vortex" => vortex(&mut t, &prof()),
            "zero-modes" => zero_modes(&mut t, &prof())?,
            "eigenfn" => eigenfn(&mut t, &prof())?,
            "measure" => measure(&mut t, &prof())?,
            "transform" => transform(&mut t, &prof(), a.seed)?,
            "lt" => lt(&mut t)?,
            _ => n2(&mut t)?,
        }
        rows.extend(t.rows);
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    if a.json {
        let mut text = serde_json::to_string_pretty(&rows).expect("rows serialize");
        text.push('\n');
        emit("-", &text)?;
    } else {
        println!("{:<4}  {:<11}  {:<42}  {:>16}  target", "", "group", "check", "value");
        for r in &rows {
            println!(
                "{:<4}  {:<11}  {:<42}  {:>16}  {}",
                if r.pass { "PASS" } else { "FAIL" },
                r.group,
                r.name,
                show(r.value),
                r.target
            );
        }
        println!("{} of {} checks pass", rows.len() - failed, rows.len());
    }
    if let Some(path) = &a.out {
        let mut art = Artifact::new("reproduce-paper", a);
        art.set("failed", failed);
        art.write_json(path, &rows)?;
    }
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} check(s) failed")));
    }
    Ok(())
}
