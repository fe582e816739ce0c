//! Fundamental systems at the bottom of the continuous spectrum.
//!
//! For `H₂` the threshold solution is explicit, `Φ⁽⁰⁾ = √r·U`, and the second
//! solution follows by reduction of order. For `H₁` nothing is explicit. The
//! regular solution is built by a Picard iteration near the origin around the
//! free pair `(r^{n+1/2}, r^{1/2-n}/(2n))`, then continued outward by the ODE.
//! A second pair of solutions, normalized at infinity to
//! `√r·cos(ν ln r)` and `-√r·sin(ν ln r)/ν`, comes from a Volterra iteration
//! inward from a large radius. Matching the two yields the connection
//! constants `c₁..c₄`.
//!
//! All tables live on [`LogPanels`], which resolve both the power laws at the
//! origin and the `ln r` oscillations at infinity with spectral accuracy.

use crate::error::{Error, Result};
use crate::numerics::ode::integrate_to_points;
use crate::numerics::{quad_adaptive, quad_to_infinity, LogPanels, OdeOptions, Tolerance};
use crate::operator::{Operator, OperatorKind};
use crate::vortex::VortexProfile;
use num_complex::Complex64;

/// Smallest tabulated radius.
pub const PANEL_R_MIN: f64 = 1e-6;
/// Largest tabulated radius. Inner series built on these tables serve every
/// `k` with `0.6/k` below this.
pub const PANEL_R_MAX: f64 = 2000.0;
const PANEL_DU: f64 = 0.2;
const PANEL_ORDER: usize = 20;
/// Where the inner Picard iteration hands over to the ODE.
const R_INNER: f64 = 0.5;
/// Truncation radius of the outer Volterra iteration.
pub const R_INFINITY: f64 = 200.0;
const R_OUTER_MIN: f64 = 8.0;
const PICARD_TOL: f64 = 1e-12;
const PICARD_MAX: usize = 60;

fn ode_tol() -> Tolerance {
    Tolerance { rel: 1e-12, abs: 1e-14 }
}

/// Outer solutions of the `H₁` threshold problem, normalized at infinity.
#[derive(Debug, Clone)]
pub struct OuterPair {
    panels: LogPanels,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    theta: Vec<f64>,
    dtheta: Vec<f64>,
    iterations: usize,
}

impl OuterPair {
    /// `((Φ∞, Φ∞'), (Θ∞, Θ∞'))` at `r` inside `[R_OUTER_MIN, R_INFINITY]`.
    pub fn eval(&self, r: f64) -> ((f64, f64), (f64, f64)) {
        let (b, w) = self.panels.stencil(r);
        let dot = |v: &[f64]| w.iter().zip(&v[b..]).map(|(a, x)| a * x).sum::<f64>();
        ((dot(&self.phi), dot(&self.dphi)), (dot(&self.theta), dot(&self.dtheta)))
    }

    pub fn range(&self) -> (f64, f64) {
        (self.panels.r_min(), self.panels.r_max())
    }

    /// Picard iterations used (the larger of the two solutions).
    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

#[derive(Debug, Clone)]
enum Far {
    /// `H₂`: `Φ = √r·U`, `Θ = -Φ·G` with `G` continued analytically.
    Explicit { g_end: f64, r_end: f64, u_far: [f64; 3] },
    /// `H₁`: `Φ ≈ √r(c₁ cos + c₂ sin)`, `Θ ≈ √r(c₃ cos + c₄ sin)` of `ν ln r`.
    Oscillatory { c: [f64; 4], nu: f64 },
}

/// Threshold fundamental system `(Φ⁽⁰⁾, Θ⁽⁰⁾)` with `W(Θ⁽⁰⁾, Φ⁽⁰⁾) = 1`.
#[derive(Debug, Clone)]
pub struct ZeroEnergyBasis {
    operator: Operator,
    slope: f64,
    panels: LogPanels,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    theta: Vec<f64>,
    dtheta: Vec<f64>,
    constants: Option<[f64; 4]>,
    eta0: Option<f64>,
    outer: Option<OuterPair>,
    inner_iterations: usize,
    far: Far,
}

fn main_panels(r_anchor: f64) -> Result<LogPanels> {
    LogPanels::new(PANEL_R_MIN, PANEL_R_MAX, PANEL_DU, &[R_INNER, 1.0, r_anchor], PANEL_ORDER)
}

/// Threshold basis for `H₂` of the profile's degree.
pub fn zero_basis_h2(p: &VortexProfile) -> Result<ZeroEnergyBasis> {
    let op = Operator::new(OperatorKind::H2, p.degree())?;
    let panels = main_panels(20.0)?;
    let nodes = panels.nodes().to_vec();
    let mut phi = Vec::with_capacity(nodes.len());
    let mut dphi = Vec::with_capacity(nodes.len());
    for &r in &nodes {
        let (u, du) = p.eval(r);
        let s = r.sqrt();
        phi.push(s * u);
        dphi.push(u / (2.0 * s) + s * du);
    }
    let inv: Vec<f64> = phi.iter().map(|f| 1.0 / (f * f)).collect();
    let g = panels.integrate_from(&inv, panels.break_node(1.0));
    let theta: Vec<f64> = phi.iter().zip(&g).map(|(f, g)| -f * g).collect();
    let dtheta: Vec<f64> =
        phi.iter().zip(&dphi).zip(&g).map(|((f, df), g)| -df * g - 1.0 / f).collect();

    let integrand = |s: f64| {
        let (u, _) = p.eval(s);
        p.one_minus_u2(s) / (s * u * u)
    };
    let tol = 1e-13;
    let mut eta0 = quad_adaptive(integrand, 1.0, 10.0, tol)?;
    eta0 += quad_adaptive(integrand, 10.0, p.r_max(), tol)?;
    eta0 += quad_to_infinity(integrand, p.r_max(), tol)?;

    let far = Far::Explicit { g_end: *g.last().unwrap(), r_end: panels.r_max(), u_far: p.far_coefficients() };
    Ok(ZeroEnergyBasis {
        operator: op,
        slope: p.slope(),
        panels,
        phi,
        dphi,
        theta,
        dtheta,
        constants: None,
        eta0: Some(eta0),
        outer: None,
        inner_iterations: 0,
        far,
    })
}

/// Threshold basis for `H₁` (energy 2) of the profile's degree, matched to the
/// outer pair at `r_anchor`.
pub fn zero_basis_h1(p: &VortexProfile, r_anchor: f64) -> Result<ZeroEnergyBasis> {
    if !(10.0..=100.0).contains(&r_anchor) {
        return Err(Error::InvalidInput(format!("r_anchor must lie in [10, 100] (got {r_anchor})")));
    }
    let op = Operator::new(OperatorKind::H1, p.degree())?;
    let n = op.n();
    let nu = op.log_frequency();
    let panels = main_panels(r_anchor)?;
    let nodes = panels.nodes().to_vec();

    // (i) Regular solution near the origin by Picard iteration.
    let inner = LogPanels::new(PANEL_R_MIN, R_INNER, PANEL_DU, &[], PANEL_ORDER)?;
    let rin = inner.nodes().to_vec();
    let v0: Vec<f64> = rin.iter().map(|&r| op.coupling() * p.one_minus_u2(r)).collect();
    let free_phi: Vec<f64> = rin.iter().map(|&r| r.powf(n + 0.5)).collect();
    let free_theta: Vec<f64> = rin.iter().map(|&r| r.powf(0.5 - n) / (2.0 * n)).collect();
    let mut y = free_phi.clone();
    let mut iters = 0;
    let (a_int, b_int) = loop {
        iters += 1;
        let ga: Vec<f64> = (0..rin.len()).map(|i| free_theta[i] * v0[i] * y[i]).collect();
        let gb: Vec<f64> = (0..rin.len()).map(|i| free_phi[i] * v0[i] * y[i]).collect();
        let a_int = inner.integrate_from_zero(&ga);
        let b_int = inner.integrate_from_zero(&gb);
        let mut change: f64 = 0.0;
        for i in 0..rin.len() {
            let new = free_phi[i] - (free_phi[i] * a_int[i] - free_theta[i] * b_int[i]);
            change = change.max((new - y[i]).abs() / free_phi[i]);
            y[i] = new;
        }
        if change < PICARD_TOL {
            break (a_int, b_int);
        }
        if iters >= PICARD_MAX {
            return Err(Error::NoContraction(format!(
                "inner threshold iteration still changing by {change:e} after {iters} sweeps"
            )));
        }
    };
    let r_in = *rin.last().unwrap();
    let last = rin.len() - 1;
    let dy_in = (n + 0.5) * free_phi[last] / r_in * (1.0 - a_int[last])
        + (0.5 - n) * free_theta[last] / r_in * b_int[last];

    // (ii) Continue outward by the ODE.
    let rhs = |r: f64, s: &[f64], d: &mut [f64]| {
        let q = op.potential(p, r);
        d[0] = s[1];
        d[1] = q * s[0];
    };
    let opts = OdeOptions::new(ode_tol());
    let n_in = inner.len();
    let out_pts: Vec<f64> = nodes[n_in..].to_vec();
    let states = integrate_to_points(rhs, (R_INNER, PANEL_R_MAX), &[y[last], dy_in], &opts, &out_pts)?;
    let mut phi = Vec::with_capacity(nodes.len());
    let mut dphi = Vec::with_capacity(nodes.len());
    for i in 0..n_in {
        phi.push(y[i]);
        let r = rin[i];
        dphi.push(
            (n + 0.5) * free_phi[i] / r * (1.0 - a_int[i]) + (0.5 - n) * free_theta[i] / r * b_int[i],
        );
    }
    for s in &states {
        phi.push(s[0]);
        dphi.push(s[1]);
    }

    // (v) Second solution: reduction of order on (0, 1], ODE beyond.
    let one = panels.break_node(1.0);
    let inv: Vec<f64> =
        phi.iter().enumerate().map(|(i, f)| if i <= one { 1.0 / (f * f) } else { 0.0 }).collect();
    let g = panels.integrate_from(&inv, one);
    let mut theta = vec![0.0; nodes.len()];
    let mut dtheta = vec![0.0; nodes.len()];
    for i in 0..=one {
        theta[i] = -phi[i] * g[i];
        dtheta[i] = -dphi[i] * g[i] - 1.0 / phi[i];
    }
    let states = integrate_to_points(rhs, (1.0, PANEL_R_MAX), &[0.0, -1.0 / phi[one]], &opts, &nodes[one + 1..])?;
    for (j, s) in states.iter().enumerate() {
        theta[one + 1 + j] = s[0];
        dtheta[one + 1 + j] = s[1];
    }

    // (iii) Outer pair from infinity.
    let outer = outer_pair(p, &op, r_anchor)?;

    // (iv) c₁, c₂ from values and derivatives at the anchor.
    let ia = panels.break_node(r_anchor);
    let ((fi, dfi), (ti, dti)) = outer.eval(nodes[ia]);
    let (c1, c2) = solve2([[fi, -nu * ti], [dfi, -nu * dti]], [phi[ia], dphi[ia]])?;

    // (vi) c₃, c₄ by least squares on [50, 150].
    let mut m = [[0.0; 2]; 2];
    let mut rhs_ls = [0.0; 2];
    for (i, &r) in nodes.iter().enumerate() {
        if !(50.0..=150.0).contains(&r) {
            continue;
        }
        let ((f, _), (t, _)) = outer.eval(r);
        let basis = [f / r.sqrt(), -nu * t / r.sqrt()];
        let target = theta[i] / r.sqrt();
        for a in 0..2 {
            rhs_ls[a] += basis[a] * target;
            for b in 0..2 {
                m[a][b] += basis[a] * basis[b];
            }
        }
    }
    let (c3, c4) = solve2(m, rhs_ls)?;

    Ok(ZeroEnergyBasis {
        operator: op,
        slope: p.slope(),
        panels,
        phi,
        dphi,
        theta,
        dtheta,
        constants: Some([c1, c2, c3, c4]),
        eta0: None,
        inner_iterations: iters,
        outer: Some(outer),
        far: Far::Oscillatory { c: [c1, c2, c3, c4], nu },
    })
}

/// Threshold basis for either operator of degree `n`; `n` must match the profile.
pub fn zero_basis_n(p: &VortexProfile, kind: OperatorKind, n: u32) -> Result<ZeroEnergyBasis> {
    if n != p.degree() {
        return Err(Error::InvalidInput(format!(
            "requested degree {n} but the profile has degree {}",
            p.degree()
        )));
    }
    match kind {
        OperatorKind::H1 => zero_basis_h1(p, 20.0),
        OperatorKind::H2 => zero_basis_h2(p),
    }
}

fn solve2(m: [[f64; 2]; 2], b: [f64; 2]) -> Result<(f64, f64)> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m[0][0].abs().max(m[0][1].abs()) * m[1][0].abs().max(m[1][1].abs());
    if det.abs() <= 1e-14 * scale || det == 0.0 {
        return Err(Error::Singular("2x2 matching system is singular".into()));
    }
    Ok(((b[0] * m[1][1] - m[0][1] * b[1]) / det, (m[0][0] * b[1] - m[1][0] * b[0]) / det))
}

/// `∫_R^∞ s^{1-p} e^{iβ ln s} ds` for `p > 2`.
fn power_tail(r: f64, p: f64, beta: f64) -> Complex64 {
    let e = Complex64::new(2.0 - p, beta);
    -(e * r.ln()).exp() / e
}

/// Outer pair by Picard iteration of the Volterra equation from infinity.
fn outer_pair(p: &VortexProfile, op: &Operator, r_anchor: f64) -> Result<OuterPair> {
    let n = op.n();
    let nu = op.log_frequency();
    let c = op.coupling();
    let panels = LogPanels::new(R_OUTER_MIN, R_INFINITY, PANEL_DU, &[r_anchor, 50.0, 150.0], PANEL_ORDER)?;
    let r = panels.nodes().to_vec();
    let len = r.len();
    let y1: Vec<f64> = r.iter().map(|&s| s.sqrt() * (nu * s.ln()).cos()).collect();
    let y2: Vec<f64> = r.iter().map(|&s| s.sqrt() * (nu * s.ln()).sin()).collect();
    let dy1: Vec<f64> =
        r.iter().map(|&s| ((nu * s.ln()).cos() / 2.0 - nu * (nu * s.ln()).sin()) / s.sqrt()).collect();
    let dy2: Vec<f64> =
        r.iter().map(|&s| ((nu * s.ln()).sin() / 2.0 + nu * (nu * s.ln()).cos()) / s.sqrt()).collect();
    let vt: Vec<f64> = r.iter().map(|&s| c * p.one_minus_u2(s) - c * n * n / (s * s)).collect();
    let [_, o4, o6] = p.one_minus_u2_coefficients();
    let (v4, v6) = (c * o4, c * o6);

    // Tail integrals ∫_R^∞ y_a Ṽ y_b with products written through cos/sin of 2ν ln s.
    let rr = R_INFINITY;
    let tail = |plain: f64, cos2: f64, sin2: f64| -> f64 {
        let mut acc = 0.0;
        for (pp, v) in [(4.0, v4), (6.0, v6)] {
            let base = rr.powf(2.0 - pp) / (pp - 2.0);
            let osc = power_tail(rr, pp, 2.0 * nu);
            acc += v * (plain * base + cos2 * osc.re + sin2 * osc.im);
        }
        acc
    };
    // y1·y1 = s(1+cos)/2, y1·y2 = s·sin/2, y2·y2 = s(1-cos)/2.
    let t11 = tail(0.5, 0.5, 0.0);
    let t12 = tail(0.0, 0.0, 0.5);
    let t22 = tail(0.5, -0.5, 0.0);

    let solve_one = |seed: &[f64], dseed: &[f64], tails: (f64, f64)| -> Result<(Vec<f64>, Vec<f64>, usize)> {
        let mut y = seed.to_vec();
        let mut dy = dseed.to_vec();
        for it in 1..=PICARD_MAX {
            let g1: Vec<f64> = (0..len).map(|i| y1[i] * vt[i] * y[i]).collect();
            let g2: Vec<f64> = (0..len).map(|i| y2[i] * vt[i] * y[i]).collect();
            let i1 = panels.integrate_to_end(&g1);
            let i2 = panels.integrate_to_end(&g2);
            let mut change: f64 = 0.0;
            for i in 0..len {
                let a1 = i1[i] + tails.0;
                let a2 = i2[i] + tails.1;
                let new = seed[i] + (y2[i] * a1 - y1[i] * a2) / nu;
                dy[i] = dseed[i] + (dy2[i] * a1 - dy1[i] * a2) / nu;
                change = change.max((new - y[i]).abs() / r[i].sqrt());
                y[i] = new;
            }
            if change < PICARD_TOL {
                return Ok((y, dy, it));
            }
        }
        Err(Error::NoContraction(format!(
            "outer Volterra iteration did not settle on [{R_OUTER_MIN}, {R_INFINITY}]"
        )))
    };
    // Φ∞ seeded by y1; tail integrals use y ≈ y1.
    let (phi, dphi, it1) = solve_one(&y1, &dy1, (t11, t12))?;
    // Θ∞ seeded by -y2/ν; tails use y ≈ -y2/ν.
    let ts: Vec<f64> = y2.iter().map(|v| -v / nu).collect();
    let dts: Vec<f64> = dy2.iter().map(|v| -v / nu).collect();
    let (theta, dtheta, it2) = solve_one(&ts, &dts, (-t12 / nu, -t22 / nu))?;
    Ok(OuterPair { panels, phi, dphi, theta, dtheta, iterations: it1.max(it2) })
}

impl ZeroEnergyBasis {
    /// Builds the basis appropriate for `op` (anchor 20 for `H₁`).
    pub fn new(p: &VortexProfile, op: Operator) -> Result<Self> {
        zero_basis_n(p, op.kind, op.degree)
    }

    pub fn operator(&self) -> Operator {
        self.operator
    }

    /// Profile slope `a` the basis was built from.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn panels(&self) -> &LogPanels {
        &self.panels
    }

    /// Node tables `(Φ, Φ', Θ, Θ')` on [`Self::panels`].
    pub fn tables(&self) -> (&[f64], &[f64], &[f64], &[f64]) {
        (&self.phi, &self.dphi, &self.theta, &self.dtheta)
    }

    /// `(c₁, c₂, c₃, c₄)` for `H₁`.
    pub fn constants(&self) -> Option<[f64; 4]> {
        self.constants
    }

    /// `η₀` for `H₂`.
    pub fn eta0(&self) -> Option<f64> {
        self.eta0
    }

    pub fn outer_pair(&self) -> Option<&OuterPair> {
        self.outer.as_ref()
    }

    /// Picard sweeps of the inner `H₁` iteration (zero for `H₂`).
    pub fn inner_iterations(&self) -> usize {
        self.inner_iterations
    }

    fn eval_tables(&self, r: f64, a: &[f64], da: &[f64], expo: f64) -> (f64, f64) {
        let lo = self.panels.r_min();
        if r < lo {
            let v = a[0] * (r / lo).powf(expo);
            return (v, expo * v / r);
        }
        let (b, w) = self.panels.stencil(r);
        let dot = |v: &[f64]| w.iter().zip(&v[b..]).map(|(x, y)| x * y).sum::<f64>();
        (dot(a), dot(da))
    }

    fn far_eval(&self, r: f64) -> ((f64, f64), (f64, f64)) {
        match &self.far {
            Far::Explicit { g_end, r_end, u_far } => {
                let x = 1.0 / (r * r);
                let w = x * (u_far[0] + x * (u_far[1] + x * u_far[2]));
                let dw = -(2.0 * u_far[0] * x + 4.0 * u_far[1] * x * x + 6.0 * u_far[2] * x * x * x) / r;
                let (u, du) = (1.0 - w, -dw);
                let s = r.sqrt();
                let f = s * u;
                let df = u / (2.0 * s) + s * du;
                let o2 = 2.0 * u_far[0];
                let g = g_end + (r / r_end).ln() + 0.5 * o2 * (1.0 / (r_end * r_end) - x);
                ((f, df), (-f * g, -df * g - 1.0 / f))
            }
            Far::Oscillatory { c, nu } => {
                let s = r.sqrt();
                let (sn, cs) = (nu * r.ln()).sin_cos();
                let y1 = s * cs;
                let y2 = s * sn;
                let d1 = (cs / 2.0 - nu * sn) / s;
                let d2 = (sn / 2.0 + nu * cs) / s;
                ((c[0] * y1 + c[1] * y2, c[0] * d1 + c[1] * d2), (c[2] * y1 + c[3] * y2, c[2] * d1 + c[3] * d2))
            }
        }
    }

    /// `(Φ⁽⁰⁾(r), Φ⁽⁰⁾'(r))`.
    pub fn phi0(&self, r: f64) -> (f64, f64) {
        if r > self.panels.r_max() {
            return self.far_eval(r).0;
        }
        self.eval_tables(r, &self.phi, &self.dphi, self.operator.n() + 0.5)
    }

    /// `(Θ⁽⁰⁾(r), Θ⁽⁰⁾'(r))`.
    pub fn theta0(&self, r: f64) -> (f64, f64) {
        if r > self.panels.r_max() {
            return self.far_eval(r).1;
        }
        self.eval_tables(r, &self.theta, &self.dtheta, 0.5 - self.operator.n())
    }

    /// `W(Θ⁽⁰⁾, Φ⁽⁰⁾)(r) = Θ Φ' - Θ' Φ`.
    pub fn wronskian(&self, r: f64) -> f64 {
        let (f, df) = self.phi0(r);
        let (t, dt) = self.theta0(r);
        t * df - dt * f
    }

    /// `c₂c₃ - c₁c₄`, which equals `1/ν` when the basis is consistent.
    pub fn constant_relation(&self) -> Option<f64> {
        self.constants.map(|c| c[1] * c[2] - c[0] * c[3])
    }

    /// Log-frequency of `Φ⁽⁰⁾/√r` on `[r_lo, r_hi]`, found by maximizing the
    /// least-squares fit quality of `A cos(ν ln r) + B sin(ν ln r)` over `ν`.
    pub fn fit_log_frequency(&self, r_lo: f64, r_hi: f64) -> Result<f64> {
        let samples: Vec<(f64, f64)> = (0..400)
            .map(|i| {
                let r = r_lo * (r_hi / r_lo).powf(i as f64 / 399.0);
                (r.ln(), self.phi0(r).0 / r.sqrt())
            })
            .collect();
        let misfit = |nu: f64| -> f64 {
            let mut m = [[0.0; 2]; 2];
            let mut b = [0.0; 2];
            for &(u, v) in &samples {
                let basis = [(nu * u).cos(), (nu * u).sin()];
                for a in 0..2 {
                    b[a] += basis[a] * v;
                    for c in 0..2 {
                        m[a][c] += basis[a] * basis[c];
                    }
                }
            }
            match solve2(m, b) {
                Ok((x, y)) => samples
                    .iter()
                    .map(|&(u, v)| (v - x * (nu * u).cos() - y * (nu * u).sin()).powi(2))
                    .sum(),
                Err(_) => f64::INFINITY,
            }
        };
        // Coarse scan, then golden-section refinement.
        let mut best = (f64::INFINITY, 0.0);
        let mut nu = 0.2;
        while nu <= 6.0 {
            let m = misfit(nu);
            if m < best.0 {
                best = (m, nu);
            }
            nu += 0.01;
        }
        let (mut a, mut b) = (best.1 - 0.01, best.1 + 0.01);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = b - g * (b - a);
            let x2 = a + g * (b - a);
            if misfit(x1) < misfit(x2) {
                b = x2;
            } else {
                a = x1;
            }
        }
        Ok(0.5 * (a + b))
    }
}
