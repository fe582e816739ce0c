//! Radial profile of the degree-`n` vortex:
//! `U'' + U'/r - n²U/r² + (1-U²)U = 0`, `U(0) = 0`, `U(∞) = 1`.
//!
//! The slope `a = lim U/rⁿ` is found by bisection on shooting trials launched
//! from the two-term series at `r_start`. A trial overshoots (crosses 1.5 and
//! blows up) or undershoots (turns around below 1); the true profile separates
//! the two classes.
//!
//! Shooting alone cannot deliver the far field: a slope error `δa` grows like
//! `δa·e^{√2 r}`, so even a bracket at rounding level loses the profile near
//! `r ≈ 15`. Past the radius where the two bracket trajectories separate, the
//! profile is therefore obtained from a Numerov discretization of the boundary
//! value problem on `[r_a, r_max]` with the asymptotic expansion as the right
//! boundary condition, solved by Newton's method. That problem is well
//! conditioned, so the far field inherits only the discretization error.

use crate::error::{Error, Result};
use crate::numerics::ode::{solve, Control, OdeOptions};
use crate::numerics::{Grid, GridKind, QuinticHermite, Tolerance};
use serde::{Deserialize, Serialize};

/// Launch radius of every shooting trial.
pub const R_START: f64 = 1e-3;

/// How a shooting trial ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// `U` exceeded 1.5: the slope is too large.
    Overshoot,
    /// `U'` turned negative while `U < 1`: the slope is too small.
    Undershoot,
    /// Reached the end of the shooting window without either event.
    Converged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingOutcome {
    pub slope_trial: f64,
    pub classification: Classification,
    /// Radius at which the classifying event fired.
    pub r_event: f64,
}

/// A solved profile: bracketed slope, interpolation table, and the analytic
/// extensions near 0 and beyond `r_max`.
#[derive(Debug, Clone)]
pub struct VortexProfile {
    degree: u32,
    slope: f64,
    bracket: (f64, f64),
    r_max: f64,
    seam: f64,
    table: QuinticHermite,
    far: [f64; 3],
}

fn series_at(n: u32, a: f64, r: f64) -> (f64, f64) {
    let nf = n as f64;
    let b = 1.0 / (4.0 * nf + 4.0);
    let rn = r.powi(n as i32);
    let u = a * rn * (1.0 - b * r * r);
    let du = a * r.powi(n as i32 - 1) * (nf - (nf + 2.0) * b * r * r);
    (u, du)
}

/// Coefficients `(A, B, C)` of `1 - U ≈ A r⁻² + B r⁻⁴ + C r⁻⁶`.
fn far_coefficients(n: u32) -> [f64; 3] {
    let n2 = (n as f64).powi(2);
    let a = 0.5 * n2;
    let b = n2 * n2 / 8.0 + n2;
    let c = 0.5 * (6.0 * a * b - a * a * a + 16.0 * b - n2 * b);
    [a, b, c]
}

fn vortex_rhs(n2: f64) -> impl Fn(f64, &[f64], &mut [f64]) {
    move |r, y, dy| {
        dy[0] = y[1];
        dy[1] = -y[1] / r + n2 * y[0] / (r * r) - (1.0 - y[0] * y[0]) * y[0];
    }
}

/// Runs one shooting trial with slope `a` out to `r_end`.
pub fn shoot(n: u32, a: f64, r_end: f64, tol: Tolerance) -> Result<ShootingOutcome> {
    let n2 = (n as f64).powi(2);
    let (u0, du0) = series_at(n, a, R_START);
    let opts = OdeOptions::new(tol).with_h_max(0.25);
    let mut class = Classification::Converged;
    let mut r_event = r_end;
    solve(vortex_rhs(n2), R_START, r_end, &[u0, du0], &opts, |seg| {
        let (u, du) = (seg.y1[0], seg.y1[1]);
        if u > 1.5 {
            class = Classification::Overshoot;
        } else if du < 0.0 && u < 1.0 {
            class = Classification::Undershoot;
        } else {
            return Control::Continue;
        }
        r_event = seg.t1();
        Control::Stop
    })?;
    Ok(ShootingOutcome { slope_trial: a, classification: class, r_event })
}

/// Target spacing of the interpolation table for a given tolerance.
fn table_spacing(tol: Tolerance) -> f64 {
    (0.005 * (tol.rel / 1e-10).powf(0.25)).clamp(0.001, 0.02)
}

/// Solves for the degree-`n` profile on `[0, r_max]`.
pub fn solve_profile(n: u32, r_max: f64, tol: Tolerance) -> Result<VortexProfile> {
    if n == 0 {
        return Err(Error::InvalidInput("vortex degree must be >= 1".into()));
    }
    if !(r_max >= 20.0) || !r_max.is_finite() {
        return Err(Error::InvalidInput(format!("r_max must be >= 20 (got {r_max})")));
    }
    let tol = Tolerance::new(tol.rel, tol.abs)?;
    // Table values feed a quintic whose second derivative divides by h², and
    // the bisection must see the same trajectories the table is built from, so
    // every shooting integration runs well below the requested tolerance.
    let fine = Tolerance { rel: (tol.rel * 1e-3).max(1e-14), abs: (tol.abs * 1e-3).max(1e-16) };
    let n2 = (n as f64).powi(2);
    let r_end = 100.0;

    // Bracket: tiny slopes undershoot (the linearization is a Bessel function),
    // large ones overshoot.
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut grow = 0;
    while shoot(n, hi, r_end, fine)?.classification != Classification::Overshoot {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 20 {
            return Err(Error::BracketNotClosed("no overshooting slope found".into()));
        }
    }
    let mut converged_hits = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(n, mid, r_end, fine)?.classification {
            Classification::Overshoot => hi = mid,
            Classification::Undershoot => lo = mid,
            Classification::Converged => {
                // Indistinguishable from the profile within the window; keep
                // shrinking around it symmetrically.
                converged_hits += 1;
                if converged_hits > 4 {
                    break;
                }
                let w = 0.25 * (hi - lo);
                lo = mid - w;
                hi = mid + w;
            }
        }
        if hi - lo <= 1e-10 * 1e-5 {
            break;
        }
    }
    if hi - lo > 1e-10 {
        return Err(Error::BracketNotClosed(format!(
            "bracket [{lo:.15}, {hi:.15}] wider than 1e-10; integrator tolerance rel={:e} too loose or too tight",
            tol.rel
        )));
    }
    let a = 0.5 * (lo + hi);

    // Where do the two bracket trajectories part? Beyond that the shooting
    // solution is not trustworthy and the boundary value solve takes over.
    let probe = |slope: f64| -> Result<Vec<f64>> {
        let (u0, du0) = series_at(n, slope, R_START);
        let pts: Vec<f64> = (1..=120).map(|i| 0.25 * i as f64).collect();
        let mut vals = Vec::with_capacity(pts.len());
        let mut next = 0;
        let opts = OdeOptions::new(fine).with_h_max(0.25);
        solve(vortex_rhs(n2), R_START, 30.0, &[u0, du0], &opts, |seg| {
            while next < pts.len() && seg.contains(pts[next]) {
                let mut y = [0.0; 2];
                seg.eval_into(pts[next], &mut y);
                vals.push(y[0]);
                next += 1;
            }
            if seg.y1[0].abs() > 2.0 {
                Control::Stop
            } else {
                Control::Continue
            }
        })?;
        Ok(vals)
    };
    let (vlo, vhi) = (probe(lo)?, probe(hi)?);
    let mut r_sep = 0.25 * vlo.len().min(vhi.len()) as f64;
    for (i, (x, y)) in vlo.iter().zip(&vhi).enumerate() {
        if (x - y).abs() > 1e-10 {
            r_sep = 0.25 * (i + 1) as f64;
            break;
        }
    }
    let r_seam_target = (r_sep - 1.0).clamp(2.0, 10.0).min(0.5 * r_max);

    let h = table_spacing(tol);
    let n_inner = ((r_seam_target - R_START) / h).round().max(4.0) as usize;
    let h1 = (r_seam_target - R_START) / n_inner as f64;
    let seam = R_START + h1 * n_inner as f64;
    let inner_pts: Vec<f64> = (0..=n_inner).map(|i| R_START + h1 * i as f64).collect();

    // Inner table from the converged shooting trajectory.
    let (u0, du0) = series_at(n, a, R_START);
    let mut inner_u = vec![u0];
    let mut inner_du = vec![du0];
    {
        let mut next = 1;
        let opts = OdeOptions::new(fine).with_h_max(0.1);
        solve(vortex_rhs(n2), R_START, seam, &[u0, du0], &opts, |seg| {
            while next < inner_pts.len() && seg.contains(inner_pts[next]) {
                let mut y = [0.0; 2];
                seg.eval_into(inner_pts[next], &mut y);
                inner_u.push(y[0]);
                inner_du.push(y[1]);
                next += 1;
            }
            Control::Continue
        })?;
        if inner_u.len() != inner_pts.len() {
            return Err(Error::Inconsistent("shooting trajectory missed table nodes".into()));
        }
    }

    // Far field: Numerov boundary value problem for v = √r U.
    let far = far_coefficients(n);
    let asym = |r: f64| -> (f64, f64) {
        let r2 = 1.0 / (r * r);
        let w = r2 * (far[0] + r2 * (far[1] + r2 * far[2]));
        let dw = -(2.0 * far[0] * r2 + 4.0 * far[1] * r2 * r2 + 6.0 * far[2] * r2 * r2 * r2) / r;
        (1.0 - w, -dw)
    };
    let n_outer = ((r_max - seam) / h).ceil().max(8.0) as usize;
    let h2 = (r_max - seam) / n_outer as f64;
    let rr: Vec<f64> = (0..=n_outer)
        .map(|i| if i == n_outer { r_max } else { seam + h2 * i as f64 })
        .collect();
    let cent = n2 - 0.25;
    let g = |r: f64, v: f64| cent / (r * r) * v - (1.0 - v * v / r) * v;
    let dg = |r: f64, v: f64| cent / (r * r) - 1.0 + 3.0 * v * v / r;
    let u_seam = *inner_u.last().unwrap();
    let du_seam = *inner_du.last().unwrap();
    let (u_end, du_end) = asym(r_max);
    let mismatch = u_seam - asym(seam).0;
    let mut v: Vec<f64> = rr
        .iter()
        .map(|&r| r.sqrt() * (asym(r).0 + mismatch * (-(2f64.sqrt()) * (r - seam)).exp()))
        .collect();
    v[0] = seam.sqrt() * u_seam;
    v[n_outer] = r_max.sqrt() * u_end;
    let c12 = h2 * h2 / 12.0;
    let m = n_outer - 1;
    let mut converged = false;
    for _ in 0..50 {
        let gv: Vec<f64> = rr.iter().zip(&v).map(|(&r, &x)| g(r, x)).collect();
        let dgv: Vec<f64> = rr.iter().zip(&v).map(|(&r, &x)| dg(r, x)).collect();
        let mut sub = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut sup = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for j in 0..m {
            let i = j + 1;
            let res = v[i + 1] - 2.0 * v[i] + v[i - 1] - c12 * (gv[i + 1] + 10.0 * gv[i] + gv[i - 1]);
            rhs[j] = -res;
            sub[j] = 1.0 - c12 * dgv[i - 1];
            diag[j] = -2.0 - 10.0 * c12 * dgv[i];
            sup[j] = 1.0 - c12 * dgv[i + 1];
        }
        let delta = thomas(&sub, &diag, &sup, &rhs)?;
        let mut dmax: f64 = 0.0;
        for j in 0..m {
            v[j + 1] += delta[j];
            dmax = dmax.max(delta[j].abs());
        }
        if dmax < 1e-14 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoContraction("far-field Newton iteration did not converge".into()));
    }
    let gv: Vec<f64> = rr.iter().zip(&v).map(|(&r, &x)| g(r, x)).collect();
    let mut outer_u = Vec::with_capacity(n_outer + 1);
    let mut outer_du = Vec::with_capacity(n_outer + 1);
    for i in 0..=n_outer {
        let r = rr[i];
        let sr = r.sqrt();
        let u = v[i] / sr;
        let du = if i == 0 {
            du_seam
        } else if i == n_outer {
            du_end
        } else {
            let dv = (v[i + 1] - v[i - 1]) / (2.0 * h2) - h2 / 12.0 * (gv[i + 1] - gv[i - 1]);
            (dv - v[i] / (2.0 * r)) / sr
        };
        outer_u.push(u);
        outer_du.push(du);
    }

    let mut nodes = inner_pts;
    let mut us = inner_u;
    let mut dus = inner_du;
    nodes.extend_from_slice(&rr[1..]);
    us.extend_from_slice(&outer_u[1..]);
    dus.extend_from_slice(&outer_du[1..]);
    let d2: Vec<f64> = nodes
        .iter()
        .zip(us.iter().zip(&dus))
        .map(|(&r, (&u, &du))| -du / r + n2 * u / (r * r) - (1.0 - u * u) * u)
        .collect();
    let grid = Grid::new(nodes, GridKind::Composite)?;
    let table = QuinticHermite::new(grid, us, dus, d2)?;
    Ok(VortexProfile { degree: n, slope: a, bracket: (lo, hi), r_max, seam, table, far })
}

/// Tridiagonal solve (Thomas algorithm).
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::Singular("tridiagonal pivot vanished".into()));
    }
    c[0] = sup[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - sub[i] * c[i - 1];
        if beta == 0.0 {
            return Err(Error::Singular("tridiagonal pivot vanished".into()));
        }
        c[i] = sup[i] / beta;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / beta;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

impl VortexProfile {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Midpoint of the final shooting bracket.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn bracket(&self) -> (f64, f64) {
        self.bracket
    }

    pub fn bracket_width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Radius where the shooting table hands over to the boundary value solve.
    pub fn seam(&self) -> f64 {
        self.seam
    }

    pub fn table_grid(&self) -> &Grid {
        self.table.grid()
    }

    /// Tabulated `(U, U')` at the table nodes.
    pub fn table_values(&self) -> (&[f64], &[f64]) {
        (self.table.values(), self.table.derivatives())
    }

    /// `(U, U', U'')`.
    pub fn eval_full(&self, r: f64) -> (f64, f64, f64) {
        let r = r.max(0.0);
        let nf = self.degree as f64;
        if r < R_START {
            if r == 0.0 {
                let du = if self.degree == 1 { self.slope } else { 0.0 };
                let d2 = if self.degree == 2 { 2.0 * self.slope } else { 0.0 };
                return (0.0, du, d2);
            }
            let (u, du) = series_at(self.degree, self.slope, r);
            let d2 = -du / r + nf * nf * u / (r * r) - (1.0 - u * u) * u;
            return (u, du, d2);
        }
        if r <= self.r_max {
            return self.table.eval(r);
        }
        let [a, b, c] = self.far;
        let x = 1.0 / (r * r);
        let w = x * (a + x * (b + x * c));
        let dw = -(2.0 * a * x + 4.0 * b * x * x + 6.0 * c * x * x * x) / r;
        let d2w = (6.0 * a * x + 20.0 * b * x * x + 42.0 * c * x * x * x) / (r * r);
        (1.0 - w, -dw, -d2w)
    }

    /// `(U, U')`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let (u, du, _) = self.eval_full(r);
        (u, du)
    }

    /// `1 - U²`, formed as `(1-U)(1+U)`; beyond `r_max` from the expansion of `1-U`
    /// directly so nothing cancels.
    pub fn one_minus_u2(&self, r: f64) -> f64 {
        if r > self.r_max {
            let [a, b, c] = self.far;
            let x = 1.0 / (r * r);
            let w = x * (a + x * (b + x * c));
            return w * (2.0 - w);
        }
        let (u, _) = self.eval(r);
        (1.0 - u) * (1.0 + u)
    }

    /// Coefficients of `1 - U² ≈ o₂ r⁻² + o₄ r⁻⁴ + o₆ r⁻⁶`.
    pub fn one_minus_u2_coefficients(&self) -> [f64; 3] {
        let [a, b, c] = self.far;
        [2.0 * a, 2.0 * b - a * a, 2.0 * c - 2.0 * a * b]
    }

    /// Coefficients of `1 - U ≈ A r⁻² + B r⁻⁴ + C r⁻⁶`.
    pub fn far_coefficients(&self) -> [f64; 3] {
        self.far
    }

    /// `U'' + U'/r - n²U/r² + (1-U²)U` from the interpolant.
    pub fn residual(&self, r: f64) -> f64 {
        let (u, du, d2u) = self.eval_full(r);
        let n2 = (self.degree as f64).powi(2);
        d2u + du / r - n2 * u / (r * r) + (1.0 - u * u) * u
    }
}

/// `(U(r), U'(r))`.
pub fn eval_profile(p: &VortexProfile, r: f64) -> (f64, f64) {
    p.eval(r)
}

/// `1 - U(r)²` without cancellation.
pub fn one_minus_u2(p: &VortexProfile, r: f64) -> f64 {
    p.one_minus_u2(r)
}
