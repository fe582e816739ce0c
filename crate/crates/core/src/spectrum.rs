//! Point spectrum of the real-part linearization below its threshold.
//!
//! Three independent views:
//! * positivity of the potential of the factorized partner of `L₂`, which rules
//!   out non-positive eigenvalues;
//! * a Lieb–Thirring moment bound (`γ = 2` by default) on
//!   `V = 1/r² - 3(1 - U²)`, with the far tail controlled by the claim
//!   `r²(1 - U²) ≤ 1.1` for `r ≥ 7`, giving a lower bound `λ₀` for every
//!   eigenvalue of `L₁`;
//! * a direct shooting search for those eigenvalues in `(0, 2)`.

use crate::error::{Error, Result};
use crate::numerics::{find_root_bracketed, integrate_ode, quad_adaptive, Tolerance};
use crate::vortex::VortexProfile;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `2U'/(rU) + 2U'²/U² + (1 - U²)`.
pub fn susy_potential(p: &VortexProfile, r: f64) -> f64 {
    let (u, du) = p.eval(r);
    let l = du / u;
    2.0 * l / r + 2.0 * l * l + p.one_minus_u2(r)
}

/// Minimum of the factorized potential on a radial grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SusyReport {
    pub min: f64,
    pub argmin: f64,
    /// `max r² V★` over grid points with `r ≤ 0.1`.
    pub near_origin_r2: f64,
}

pub fn susy_positivity(p: &VortexProfile, r_grid: &[f64]) -> Result<SusyReport> {
    if r_grid.is_empty() || r_grid.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidInput("factorized potential needs a grid of positive radii".into()));
    }
    let mut min = f64::INFINITY;
    let mut argmin = r_grid[0];
    let mut near: f64 = 0.0;
    for &r in r_grid {
        let v = susy_potential(p, r);
        if v < min {
            min = v;
            argmin = r;
        }
        if r <= 0.1 {
            near = near.max(r * r * v.abs());
        }
    }
    Ok(SusyReport { min, argmin, near_origin_r2: near })
}

/// `V(r) = 1/r² - 3(1 - U²)`: the potential of `H₁ - 2` minus its `-1/(4r²)`
/// Hardy part.
pub fn lt_potential(p: &VortexProfile, r: f64) -> f64 {
    1.0 / (r * r) - 3.0 * p.one_minus_u2(r)
}

/// Outcome of the Lieb–Thirring computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LtBoundResult {
    pub gamma: f64,
    /// Sign change of `V`.
    pub r0: f64,
    /// End of the numerically integrated range.
    pub r1: f64,
    /// `∫_{r₀}^{r₁} V₋^{γ+1} r dr`.
    pub a_integral: f64,
    /// Analytic bound on `∫_{r₁}^∞ V₋^{γ+1} r dr`.
    pub r_tail: f64,
    /// Constant `3m - 1` in the tail bound `V₋ ≤ (3m - 1)/r²`.
    pub tail_constant: f64,
    /// `(A + R)/(2(γ + 1))`.
    pub trace_bound: f64,
    /// `2 - trace_bound^{1/γ}`.
    pub lambda0: f64,
    /// `|∂A/∂U|` for a uniform shift of `U`, by finite difference.
    pub a_sensitivity: f64,
    /// Induced uncertainty on `A` from the profile's shooting bracket.
    pub a_bracket_error: f64,
}

/// Bound on `r²(1 - U²)` for `r ≥ 7` assumed by the headline tail term.
pub const TAIL_CLAIM: f64 = 1.1;
pub const LT_R1: f64 = 7.0;

/// Lieb–Thirring bound with `r₁ = 7` and the claimed tail constant `1.1`.
pub fn lt_bound(p: &VortexProfile, gamma: f64) -> Result<LtBoundResult> {
    lt_bound_with(p, gamma, LT_R1, TAIL_CLAIM)
}

/// Lieb–Thirring bound with explicit `r₁` and tail bound `m ≥ r²(1 - U²)` on `[r₁, ∞)`.
pub fn lt_bound_with(p: &VortexProfile, gamma: f64, r1: f64, m: f64) -> Result<LtBoundResult> {
    if !(gamma >= 1.5 && gamma.is_finite()) {
        return Err(Error::InvalidInput(format!("the Lieb-Thirring constant used here needs gamma >= 3/2 (got {gamma})")));
    }
    if p.degree() != 1 {
        return Err(Error::InvalidInput("the Lieb-Thirring bound is set up for the degree-1 vortex".into()));
    }
    let root = find_root_bracketed(|r| lt_potential(p, r), 0.1, 2.0, 1e-14)?;
    let r0 = root.x;
    if !(r1 > r0) {
        return Err(Error::InvalidInput(format!("r1 = {r1} must exceed the sign change r0 = {r0}")));
    }
    let integral = |shift: f64| -> Result<f64> {
        quad_adaptive(
            |r| {
                let u = p.eval(r).0 + shift;
                let v = 1.0 / (r * r) - 3.0 * (1.0 - u * u);
                (-v).max(0.0).powf(gamma + 1.0) * r
            },
            r0,
            r1,
            1e-12,
        )
    };
    let a_integral = integral(0.0)?;
    if !(a_integral > 0.0) {
        return Err(Error::Inconsistent("V has no negative part on (r0, r1); the profile is corrupt".into()));
    }
    let eps = 1e-6;
    let a_sensitivity = ((integral(eps)? - integral(-eps)?) / (2.0 * eps)).abs();
    let a_bracket_error = a_sensitivity * p.bracket_width() * r1;
    let tail_constant = 3.0 * m - 1.0;
    let r_tail = tail_constant.powf(gamma + 1.0) * r1.powf(-2.0 * gamma) / (2.0 * gamma);
    let trace_bound = (a_integral + r_tail) / (2.0 * (gamma + 1.0));
    let lambda0 = 2.0 - trace_bound.powf(1.0 / gamma);
    Ok(LtBoundResult {
        gamma,
        r0,
        r1,
        a_integral,
        r_tail,
        tail_constant,
        trace_bound,
        lambda0,
        a_sensitivity,
        a_bracket_error,
    })
}

/// The far-field claim `r²(1 - U²) ≤ 1.1` and its barrier function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailClaim {
    /// `max r²(1 - U²)` over `[7, 400]`.
    pub max: f64,
    pub argmax: f64,
    /// `max B(r)` over `[7, 400]`; negative means the barrier argument closes.
    pub barrier_max: f64,
}

impl TailClaim {
    pub fn holds(&self) -> bool {
        self.max <= TAIL_CLAIM && self.barrier_max < 0.0
    }
}

/// `B(r) = -0.1 r⁻² + (1.65 + 3·0.55²) r⁻⁴ - 0.55³ r⁻⁶`.
pub fn barrier(r: f64) -> f64 {
    let x = 1.0 / (r * r);
    -0.1 * x + (1.65 + 3.0 * 0.55 * 0.55) * x * x - 0.55f64.powi(3) * x * x * x
}

pub fn verify_tail_claim(p: &VortexProfile) -> Result<TailClaim> {
    if p.r_max() < 400.0 {
        return Err(Error::InvalidInput(format!(
            "the tail claim is checked on [7, 400]; the profile only reaches r = {}",
            p.r_max()
        )));
    }
    let n = 40_000;
    let (mut max, mut argmax, mut bmax) = (f64::NEG_INFINITY, LT_R1, f64::NEG_INFINITY);
    for i in 0..=n {
        // Denser near r = 7 where the maximum sits.
        let s = i as f64 / n as f64;
        let r = LT_R1 * (400.0 / LT_R1).powf(s);
        let v = r * r * p.one_minus_u2(r);
        if v > max {
            max = v;
            argmax = r;
        }
        bmax = bmax.max(barrier(r));
    }
    Ok(TailClaim { max, argmax, barrier_max: bmax })
}

/// Eigenvalues of `L₁` below 2 found by shooting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    pub values: Vec<f64>,
    /// Normalized matching Wronskian at each converged eigenvalue.
    pub residuals: Vec<f64>,
    pub r_big: f64,
    /// Eigenvalues above `2 - (4/R_big)²` decay too slowly to be resolved.
    pub resolvable_limit: f64,
    /// Sign changes found on `[scan_lo, 0]` (none expected).
    pub nonpositive_crossings: usize,
}

pub const DEFAULT_R_BIG: f64 = 150.0;
pub const SCAN_STEP: f64 = 0.005;
const R_SMALL: f64 = 1e-3;
const R_MATCH: f64 = 2.0;
const SCAN_LO: f64 = -1.0;

/// Normalized Wronskian of the regular solution and the decaying solution of
/// `-f'' + (q + 2) f = λ f` at `r = 2`; zero exactly at eigenvalues.
pub fn matching_wronskian(p: &VortexProfile, lambda: f64, r_big: f64) -> Result<f64> {
    if !(lambda < 2.0) {
        return Err(Error::InvalidInput(format!("shooting needs lambda < 2 (got {lambda})")));
    }
    let nu = p.degree() as f64 + 0.5;
    let cent = nu * (nu - 1.0);
    let rhs = |r: f64, y: &[f64], d: &mut [f64]| {
        d[0] = y[1];
        d[1] = (cent / (r * r) - 3.0 * p.one_minus_u2(r) + 2.0 - lambda) * y[0];
    };
    let tol = Tolerance::new(1e-12, 1e-300)?;
    let beta = (2.0 - 3.0 - lambda) / (4.0 * nu + 2.0);
    let r = R_SMALL;
    let y0 = [r.powf(nu) * (1.0 + beta * r * r), nu * r.powf(nu - 1.0) + (nu + 2.0) * beta * r.powf(nu + 1.0)];
    let left = integrate_ode(rhs, (R_SMALL, R_MATCH), &y0, tol)?;
    let kappa = (2.0 - lambda).sqrt();
    let right = integrate_ode(rhs, (r_big, R_MATCH), &[1.0, -kappa], tol)?;
    let (mut a, mut b) = ([0.0; 2], [0.0; 2]);
    left.eval_into(R_MATCH, &mut a);
    right.eval_into(R_MATCH, &mut b);
    let w = a[0] * b[1] - a[1] * b[0];
    Ok(w / (a[0].hypot(a[1]) * b[0].hypot(b[1])))
}

/// Scans `λ ∈ [-1, 2 - (4/R_big)²]` (step 0.005, refined geometrically near 2)
/// and refines every sign change; returns at most `count` eigenvalues.
pub fn find_eigenvalues(p: &VortexProfile, count: usize, r_big: f64) -> Result<EigenvalueList> {
    if count == 0 || count > 8 {
        return Err(Error::InvalidInput(format!("eigenvalue count must be in 1..=8 (got {count})")));
    }
    if !(r_big >= 20.0) {
        return Err(Error::InvalidInput(format!("R_big must be at least 20 (got {r_big})")));
    }
    let top = 2.0 - (4.0 / r_big).powi(2);
    let mut grid: Vec<f64> = (0..).map(|i| SCAN_LO + SCAN_STEP * i as f64).take_while(|&l| l < top).collect();
    let mut gap = 0.05;
    while 2.0 - gap < top {
        grid.push(2.0 - gap);
        gap *= 0.9;
    }
    grid.push(top);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    let vals: Vec<f64> = grid.par_iter().map(|&l| matching_wronskian(p, l, r_big)).collect::<Result<_>>()?;
    let mut values = Vec::new();
    let mut residuals = Vec::new();
    let mut nonpositive = 0;
    for i in 0..grid.len() - 1 {
        if vals[i].signum() == vals[i + 1].signum() {
            continue;
        }
        if grid[i] <= 0.0 {
            nonpositive += 1;
            continue;
        }
        let root = find_root_bracketed(|l| matching_wronskian(p, l, r_big).unwrap_or(f64::NAN), grid[i], grid[i + 1], 1e-13)?;
        values.push(root.x);
        residuals.push(matching_wronskian(p, root.x, r_big)?.abs());
        if values.len() == count {
            break;
        }
    }
    Ok(EigenvalueList { values, residuals, r_big, resolvable_limit: top, nonpositive_crossings: nonpositive })
}
