//! Generalized eigenfunctions `Φ(r,k²)` (regular at the origin) and Weyl
//! solutions `Ψ(r,k²)` (outgoing at infinity) of the reduced equation
//! `-y'' + q y = k² y`.
//!
//! Small `rk`: `Φ = Σ_j (-k²)^j y_j(r)` with `y_0 = Φ⁽⁰⁾` and
//! `-y_j'' + q y_j = -y_{j-1}`, solved by the Green kernel of the threshold
//! pair, `y_j = Φ⁽⁰⁾∫₀^r Θ⁽⁰⁾y_{j-1} - Θ⁽⁰⁾∫₀^r Φ⁽⁰⁾y_{j-1}`. The `y_j` do
//! not depend on `k`, so they are tabulated once per operator and every
//! eigenfunction reuses them.
//!
//! Large `rk`: `Ψ = k^{-1/2} e^{ikr} σ(r)`, `σ = Σ_j k^{-j} f_j(r)` with
//! `f_0 = 1` and `f_{j+1} = (i/2) f_j' + (i/2)∫_r^∞ q f_j`. Using the
//! three-term large-`r` expansion of `q`, every `f_j` is an exact polynomial in
//! `1/r`. The series seeds `Ψ` far out; the ODE carries it inward.

use crate::error::{Error, Result};
use crate::numerics::{integrate_ode, Tolerance, Trajectory};
use crate::operator::{Operator, OperatorKind};
use crate::vortex::VortexProfile;
use crate::zero_modes::ZeroEnergyBasis;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default highest recursion order of the inner series.
pub const DEFAULT_INNER_ORDER: usize = 18;
/// Default order of the Weyl series used to seed the inward integration.
pub const DEFAULT_WEYL_ORDER: usize = 8;
/// Default seam `rk` between the inner series and the Weyl representation.
pub const DEFAULT_C_MATCH: f64 = 0.5;
/// The Weyl series is only trusted for `kr` and `r` at least this large.
pub const WEYL_SEED_KR: f64 = 40.0;
/// Radii `{0.4, 0.5, 0.6}/k` at which the connection Wronskian is evaluated.
pub const WRONSKIAN_RADII: [f64; 3] = [0.4, 0.5, 0.6];

/// Tabulated inner-series coefficients `y_j` and `y_j'` on the threshold
/// basis panels.
#[derive(Debug, Clone)]
pub struct InnerSeries {
    operator: Operator,
    basis: Arc<ZeroEnergyBasis>,
    values: Vec<Vec<f64>>,
    derivs: Vec<Vec<f64>>,
}

/// Tabulates `y_0..y_J` from the threshold basis.
pub fn inner_series(basis: Arc<ZeroEnergyBasis>, order: usize) -> Result<InnerSeries> {
    if order == 0 || order > 40 {
        return Err(Error::InvalidInput(format!("inner series order must be in 1..=40 (got {order})")));
    }
    let panels = basis.panels();
    let (phi, dphi, theta, dtheta) = basis.tables();
    let mut values = vec![phi.to_vec()];
    let mut derivs = vec![dphi.to_vec()];
    for j in 1..=order {
        let prev = &values[j - 1];
        let ga: Vec<f64> = theta.iter().zip(prev).map(|(a, b)| a * b).collect();
        let gb: Vec<f64> = phi.iter().zip(prev).map(|(a, b)| a * b).collect();
        let a = panels.integrate_from_zero(&ga);
        let b = panels.integrate_from_zero(&gb);
        let y: Vec<f64> = (0..phi.len()).map(|i| phi[i] * a[i] - theta[i] * b[i]).collect();
        let dy: Vec<f64> = (0..phi.len()).map(|i| dphi[i] * a[i] - dtheta[i] * b[i]).collect();
        values.push(y);
        derivs.push(dy);
    }
    Ok(InnerSeries { operator: basis.operator(), basis, values, derivs })
}

impl InnerSeries {
    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn basis(&self) -> &ZeroEnergyBasis {
        &self.basis
    }

    /// Largest radius the tables cover.
    pub fn r_max(&self) -> f64 {
        self.basis.panels().r_max()
    }

    /// `f_j(r) = y_j(r)/√r`, the normalized coefficient (so `f_0 = U` for `H₂`).
    pub fn coefficient(&self, j: usize, r: f64) -> f64 {
        let panels = self.basis.panels();
        let (b, w) = panels.stencil(r);
        let v: f64 = w.iter().zip(&self.values[j][b..]).map(|(a, x)| a * x).sum();
        v / r.sqrt()
    }

    /// `(y_j(r), y_j'(r))`.
    pub fn term(&self, j: usize, r: f64) -> (f64, f64) {
        let (b, w) = self.basis.panels().stencil(r);
        let dot = |t: &[f64]| w.iter().zip(&t[b..]).map(|(a, x)| a * x).sum::<f64>();
        (dot(&self.values[j]), dot(&self.derivs[j]))
    }

    /// Smallest order whose factorial tail bound `(kr)^{2J}/(4^J J!²)` drops
    /// below `tol` for `rk ≤ c_match`.
    pub fn truncation_order(c_match: f64, tol: f64) -> usize {
        let mut term = 1.0;
        for j in 1..=60 {
            term *= c_match * c_match / (4.0 * (j * j) as f64);
            if term < tol {
                return j;
            }
        }
        60
    }

    /// `(Φ(r,k²), ∂_rΦ(r,k²))` from the series.
    pub fn eval(&self, r: f64, k: f64) -> (f64, f64) {
        let panels = self.basis.panels();
        if r < panels.r_min() {
            return self.basis.phi0(r);
        }
        let (b, w) = panels.stencil(r);
        let m = w.len();
        let z = -k * k;
        let mut pw = 1.0;
        let (mut v, mut dv) = (0.0, 0.0);
        let mut small = 0;
        for j in 0..self.values.len() {
            let yj: f64 = (0..m).map(|p| w[p] * self.values[j][b + p]).sum();
            let dyj: f64 = (0..m).map(|p| w[p] * self.derivs[j][b + p]).sum();
            let (tv, td) = (pw * yj, pw * dyj);
            v += tv;
            dv += td;
            if j > 0 && tv.abs() <= 1e-18 * v.abs() && td.abs() <= 1e-18 * dv.abs() {
                small += 1;
                if small >= 2 {
                    break;
                }
            } else {
                small = 0;
            }
            pw *= z;
        }
        (v, dv)
    }
}

/// Polynomials in `1/r` for the Weyl series coefficients `f_j`.
#[derive(Debug, Clone)]
pub struct WeylSeries {
    coeffs: Vec<Vec<Complex64>>,
}

impl WeylSeries {
    /// Builds `f_0..f_{order}` for the reduced potential of `op`.
    pub fn new(op: &Operator, p: &VortexProfile, order: usize) -> Self {
        let [q2, q4, q6] = op.far_coefficients(p);
        let q = [(2usize, q2), (4, q4), (6, q6)];
        let half_i = Complex64::new(0.0, 0.5);
        let mut coeffs = vec![vec![Complex64::new(1.0, 0.0)]];
        for j in 0..order {
            let f = &coeffs[j];
            let mut next = vec![Complex64::new(0.0, 0.0); f.len() + 6];
            for (m, c) in f.iter().enumerate() {
                if m > 0 {
                    // d/dr x^m = -m x^{m+1}
                    next[m + 1] += half_i * (-(m as f64)) * c;
                }
                for &(pp, qv) in &q {
                    // ∫_r^∞ s^{-(m+pp)} ds = x^{m+pp-1}/(m+pp-1)
                    let e = m + pp - 1;
                    next[e] += half_i * qv * c / e as f64;
                }
            }
            while next.len() > 1 && next.last().is_some_and(|c| c.norm() == 0.0) {
                next.pop();
            }
            coeffs.push(next);
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients of `f_j` in powers of `1/r`.
    pub fn coefficients(&self, j: usize) -> &[Complex64] {
        &self.coeffs[j]
    }

    /// `(σ, σ')` truncated at order `j0`.
    pub fn sigma(&self, r: f64, k: f64, j0: usize) -> (Complex64, Complex64) {
        let x = 1.0 / r;
        let mut s = Complex64::new(0.0, 0.0);
        let mut ds = Complex64::new(0.0, 0.0);
        let mut kp = 1.0;
        for f in self.coeffs.iter().take(j0.min(self.order()) + 1) {
            let mut v = Complex64::new(0.0, 0.0);
            let mut dv = Complex64::new(0.0, 0.0);
            let mut xm = 1.0;
            for (m, c) in f.iter().enumerate() {
                v += c * xm;
                // d/dr x^m = -m x^{m+1}
                dv += c * (-(m as f64) * xm * x);
                xm *= x;
            }
            s += v * kp;
            ds += dv * kp;
            kp /= k;
        }
        (s, ds)
    }

    /// `(Ψ, Ψ')` from the truncated series.
    pub fn psi(&self, r: f64, k: f64, j0: usize) -> (Complex64, Complex64) {
        let (s, ds) = self.sigma(r, k, j0);
        let e = Complex64::from_polar(k.powf(-0.5), k * r);
        let ik = Complex64::new(0.0, k);
        (e * s, e * (ik * s + ds))
    }
}

/// Outgoing solution `Ψ(r,k²)` on `[r_eval, ∞)`.
#[derive(Debug, Clone)]
pub struct WeylSolution {
    operator: Operator,
    k: f64,
    r_eval: f64,
    r_init: f64,
    order: usize,
    series: Arc<WeylSeries>,
    trajectory: Option<Trajectory>,
}

/// Seeds the series at `R_init = max(r_eval, 40/k, 40)` and integrates inward to `r_eval`.
pub fn weyl_solution(
    op: &Operator,
    p: &VortexProfile,
    series: Arc<WeylSeries>,
    k: f64,
    r_eval: f64,
    order: usize,
    tol: Tolerance,
) -> Result<WeylSolution> {
    weyl_solution_to(op, p, series, k, r_eval, 0.0, order, tol)
}

/// As [`weyl_solution`], but seeds no lower than `r_top` so that the dense
/// trajectory covers `[r_eval, r_top]`.
#[allow(clippy::too_many_arguments)]
pub fn weyl_solution_to(
    op: &Operator,
    p: &VortexProfile,
    series: Arc<WeylSeries>,
    k: f64,
    r_eval: f64,
    r_top: f64,
    order: usize,
    tol: Tolerance,
) -> Result<WeylSolution> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidInput(format!("Weyl solution needs k > 0 (got {k})")));
    }
    if !(r_eval > 0.0) || r_eval * k < 0.1 {
        return Err(Error::InvalidInput(format!(
            "r_eval = {r_eval} is inside the inner region for k = {k}; use the inner series there"
        )));
    }
    if order > series.order() {
        return Err(Error::InvalidInput(format!(
            "Weyl order {order} exceeds the {} terms tabulated",
            series.order()
        )));
    }
    let r_init = r_eval.max(r_top).max(WEYL_SEED_KR / k).max(WEYL_SEED_KR);
    // The amplitude σ = √k e^{-ikr} Ψ varies on the scale of r rather than of
    // the wavelength, so integrating it needs far fewer steps than Ψ itself.
    let trajectory = if r_init > r_eval {
        let (s, ds) = series.sigma(r_init, k, order);
        let op = *op;
        let two_k = 2.0 * k;
        let rhs = move |r: f64, y: &[f64], d: &mut [f64]| {
            let q = op.potential(p, r);
            d[0] = y[2];
            d[1] = y[3];
            d[2] = q * y[0] + two_k * y[3];
            d[3] = q * y[1] - two_k * y[2];
        };
        Some(integrate_ode(rhs, (r_init, r_eval), &[s.re, s.im, ds.re, ds.im], tol)?)
    } else {
        None
    };
    Ok(WeylSolution { operator: *op, k, r_eval, r_init, order, series, trajectory })
}

impl WeylSolution {
    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Radius where the series seeded the integration.
    pub fn r_init(&self) -> f64 {
        self.r_init
    }

    /// Smallest radius covered.
    pub fn r_eval(&self) -> f64 {
        self.r_eval
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `(Ψ, Ψ')` for `r ≥ r_eval` (clamped below).
    pub fn eval(&self, r: f64) -> (Complex64, Complex64) {
        if r >= self.r_init {
            return self.series.psi(r, self.k, self.order);
        }
        match &self.trajectory {
            Some(t) => {
                let r = r.max(self.r_eval);
                let mut y = [0.0; 4];
                t.eval_into(r, &mut y);
                let s = Complex64::new(y[0], y[1]);
                let ds = Complex64::new(y[2], y[3]);
                let e = Complex64::from_polar(self.k.powf(-0.5), self.k * r);
                (e * s, e * (Complex64::new(0.0, self.k) * s + ds))
            }
            None => self.series.psi(r, self.k, self.order),
        }
    }

    /// `W(Ψ̄, Ψ)(r)`, which should be `2i`.
    pub fn wronskian(&self, r: f64) -> Complex64 {
        let (p, dp) = self.eval(r);
        p.conj() * dp - dp.conj() * p
    }
}

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Inner,
    Outer,
}

impl Region {
    pub fn tag(&self) -> &'static str {
        match self {
            Region::Inner => "inner",
            Region::Outer => "outer",
        }
    }
}

/// `Φ(·,k²)` as inner series for `rk ≤ c_match` and `2Re(a Ψ)` beyond.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    k: f64,
    c_match: f64,
    inner: Arc<InnerSeries>,
    outer: WeylSolution,
    a_conn: Complex64,
    spread: f64,
}

impl Eigenfunction {
    pub fn operator(&self) -> Operator {
        self.outer.operator
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Connection coefficient `a(k²) = (i/2) W(Φ, Ψ̄)`.
    pub fn a_conn(&self) -> Complex64 {
        self.a_conn
    }

    /// Relative spread of the three Wronskian evaluations.
    pub fn spread(&self) -> f64 {
        self.spread
    }

    pub fn c_match(&self) -> f64 {
        self.c_match
    }

    pub fn weyl(&self) -> &WeylSolution {
        &self.outer
    }

    pub fn inner(&self) -> &InnerSeries {
        &self.inner
    }

    /// Seam radius `c_match/k`.
    pub fn seam(&self) -> f64 {
        self.c_match / self.k
    }

    pub fn region(&self, r: f64) -> Region {
        if r * self.k <= self.c_match {
            Region::Inner
        } else {
            Region::Outer
        }
    }

    /// `(Φ, ∂_rΦ)` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        match self.region(r) {
            Region::Inner => self.inner.eval(r, self.k),
            Region::Outer => self.eval_outer(r),
        }
    }

    /// `2Re(aΨ)` and its derivative, regardless of region.
    pub fn eval_outer(&self, r: f64) -> (f64, f64) {
        let (p, dp) = self.outer.eval(r);
        ((2.0 * self.a_conn * p).re, (2.0 * self.a_conn * dp).re)
    }

    /// `Φ` alone.
    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }
}

/// Everything needed to produce eigenfunctions of one operator: the profile,
/// the threshold basis and the two `k`-independent series tables.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    operator: Operator,
    profile: Arc<VortexProfile>,
    basis: Arc<ZeroEnergyBasis>,
    inner: Arc<InnerSeries>,
    weyl: Arc<WeylSeries>,
    c_match: f64,
    weyl_order: usize,
    tol: Tolerance,
}

impl EigenSystem {
    /// Builds the threshold basis and the series tables for `kind` with the
    /// default seam, orders and tolerance.
    pub fn new(profile: Arc<VortexProfile>, kind: OperatorKind) -> Result<Self> {
        let op = Operator::new(kind, profile.degree())?;
        let basis = Arc::new(ZeroEnergyBasis::new(&profile, op)?);
        Self::from_basis(profile, basis, DEFAULT_C_MATCH, Tolerance::default())
    }

    pub fn from_basis(
        profile: Arc<VortexProfile>,
        basis: Arc<ZeroEnergyBasis>,
        c_match: f64,
        tol: Tolerance,
    ) -> Result<Self> {
        if !(c_match > 0.3 && c_match <= 0.6) {
            return Err(Error::InvalidInput(format!("c_match must lie in (0.3, 0.6] (got {c_match})")));
        }
        let op = basis.operator();
        if op.degree != profile.degree() {
            return Err(Error::InvalidInput("basis and profile degrees differ".into()));
        }
        let inner = Arc::new(inner_series(basis.clone(), DEFAULT_INNER_ORDER)?);
        let weyl = Arc::new(WeylSeries::new(&op, &profile, DEFAULT_WEYL_ORDER.max(12)));
        Ok(Self { operator: op, profile, basis, inner, weyl, c_match, weyl_order: DEFAULT_WEYL_ORDER, tol })
    }

    /// Same system with a different Weyl seeding order.
    pub fn with_weyl_order(mut self, order: usize) -> Result<Self> {
        if order > self.weyl.order() {
            self.weyl = Arc::new(WeylSeries::new(&self.operator, &self.profile, order));
        }
        self.weyl_order = order;
        Ok(self)
    }

    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn profile(&self) -> &VortexProfile {
        &self.profile
    }

    pub fn basis(&self) -> &ZeroEnergyBasis {
        &self.basis
    }

    pub fn inner(&self) -> &InnerSeries {
        &self.inner
    }

    pub fn weyl_series(&self) -> &WeylSeries {
        &self.weyl
    }

    pub fn c_match(&self) -> f64 {
        self.c_match
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// Smallest `k` whose Wronskian radii fit inside the inner tables.
    pub fn k_min(&self) -> f64 {
        WRONSKIAN_RADII[2] / self.inner.r_max()
    }

    /// Weyl solution for `k`, covering `[r_eval, ∞)`.
    pub fn weyl_solution(&self, k: f64, r_eval: f64) -> Result<WeylSolution> {
        weyl_solution(&self.operator, &self.profile, self.weyl.clone(), k, r_eval, self.weyl_order, self.tol)
    }

    /// Builds `Φ(·,k²)` including its connection coefficient.
    pub fn eigenfunction(&self, k: f64) -> Result<Eigenfunction> {
        self.eigenfunction_to(k, 0.0)
    }

    /// As [`Self::eigenfunction`], with the Weyl trajectory extended to `r_top`
    /// (cheaper to evaluate there than the series).
    pub fn eigenfunction_to(&self, k: f64, r_top: f64) -> Result<Eigenfunction> {
        if !(k >= self.k_min()) || !k.is_finite() {
            return Err(Error::InvalidInput(format!(
                "k = {k} is below the smallest supported frequency {:.3e}",
                self.k_min()
            )));
        }
        let r_eval = WRONSKIAN_RADII[0] / k;
        let outer = weyl_solution_to(
            &self.operator,
            &self.profile,
            self.weyl.clone(),
            k,
            r_eval,
            r_top,
            self.weyl_order,
            self.tol,
        )?;
        let mut vals = [Complex64::new(0.0, 0.0); 3];
        for (v, c) in vals.iter_mut().zip(WRONSKIAN_RADII) {
            let r = c / k;
            let (f, df) = self.inner.eval(r, k);
            let (p, dp) = outer.eval(r);
            *v = Complex64::new(0.0, 0.5) * (f * dp.conj() - df * p.conj());
        }
        let mean = (vals[0] + vals[1] + vals[2]) / 3.0;
        let spread = vals.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max) / mean.norm();
        Ok(Eigenfunction { k, c_match: self.c_match, inner: self.inner.clone(), outer, a_conn: mean, spread })
    }
}

/// `(Φ(r,k²), ∂_rΦ(r,k²))` for any `r ≥ 0`, `k ≥ 0`.
pub fn phi_global(sys: &EigenSystem, r: f64, k: f64) -> Result<(f64, f64)> {
    if !(r >= 0.0 && k >= 0.0) || !r.is_finite() || !k.is_finite() {
        return Err(Error::InvalidInput(format!("phi_global needs r, k >= 0 (got r={r}, k={k})")));
    }
    if k == 0.0 {
        return Ok(sys.basis.phi0(r));
    }
    if r * k <= sys.c_match {
        return Ok(sys.inner.eval(r, k));
    }
    Ok(sys.eigenfunction(k)?.eval(r))
}
